#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vertfe {

/// One numerical-failure-load column of the study table.
enum class StudyColumn {
    EnsamOp1T1,
    EnsamOp1T2,
    EnsamOp2T1,
    LyonOp3T1,
    LyonOp3T2,
};
constexpr int kStudyColumnCount = 5;
const char* study_column_name(StudyColumn c);

struct StudyRecord {
    std::string donor;
    std::string level;
    double experimental_n = 0.0;
    std::optional<double> numerical_n[kStudyColumnCount];
};

struct StudyTable {
    std::vector<StudyRecord> records;

    /// Column values in record order; throws Error("MissingCells") naming
    /// the absent (donor, level, column) keys.
    std::vector<double> column(StudyColumn c) const;
    std::vector<double> experimental() const;
};

// CSV schema: donor,level,experimental,ensam_op1_t1,ensam_op1_t2,
//             ensam_op2_t1,lyon_op3_t1,lyon_op3_t2  (header required)
StudyTable load_study_csv(const std::string& path);
void save_study_csv(const StudyTable& table, const std::string& path);

// ===========================================================================
// Agreement / reproducibility statistics (sample SD, n-1 divisor)
// ===========================================================================

/// mean and sample SD of (numerical - experimental).
std::pair<double, double> accuracy_precision(const std::vector<double>& numerical,
                                             const std::vector<double>& experimental);

/// Square of the Pearson correlation coefficient.
double r_squared(const std::vector<double>& x, const std::vector<double>& y);

struct BlandAltman {
    std::vector<double> mean_n;
    std::vector<double> diff_n;
    double bias = 0.0;
    double limit_low = 0.0;  // bias - 1.96*SD
    double limit_high = 0.0; // bias + 1.96*SD
};
BlandAltman bland_altman(const std::vector<double>& numerical,
                         const std::vector<double>& experimental);

struct IntraOperator {
    std::vector<double> per_specimen_pct; // 100*|t2-t1| / ((t2+t1)/2)
    double mean_pct = 0.0;
    double sd_pct = 0.0;
};
IntraOperator intra_operator(const std::vector<double>& trial1,
                             const std::vector<double>& trial2);

// ===========================================================================
// Full report (Table 2 analogue)
// ===========================================================================

struct AgreementRow {
    std::string label;
    double accuracy_n = 0.0;   // mean difference
    double precision_n = 0.0;  // SD of difference
    double r2 = 0.0;
    bool has_r2 = true;
    bool signed_diff_row = false; // intra/inter rows report |mean| too
    double abs_accuracy_n = 0.0;
    std::string diff_order; // e.g. "t1-t2" for the signed rows
};

struct StudyReport {
    std::vector<AgreementRow> rows;
    IntraOperator intra_ensam_op1; // Eq. (2) percentages
    IntraOperator intra_lyon_op3;
    double cross_model_r2 = 0.0;   // Ensam op1 t1 vs Lyon op3 t1
    std::vector<double> column_means; // experimental + 5 numerical columns
    std::vector<double> column_sds;
    BlandAltman ba_ensam_op1_t1;
    BlandAltman ba_lyon_op3_t1;
    bool gluer_advisory_ok = true; // >= 27 cases with 2 observations
};

StudyReport summarize(const StudyTable& table);

/// Writes table2.csv, report.json, Bland-Altman and intra-operator point
/// files into out_dir.
void write_report_files(const StudyReport& report, const std::string& out_dir);

} // namespace vertfe
