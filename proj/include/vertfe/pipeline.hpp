#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vertfe/failure.hpp"
#include "vertfe/fem.hpp"
#include "vertfe/material.hpp"
#include "vertfe/mesh.hpp"
#include "vertfe/segment.hpp"
#include "vertfe/voxel.hpp"

namespace vertfe {

enum class LoadPosition { AnteriorThird, Centroid };

/// Everything a pipeline run depends on. Serializes to/from a single JSON
/// config file; the canonical serialization is hashed into every result.
struct PipelineConfig {
    ModelVariant model = ModelVariant::Ensam;
    Orientation orientation{};

    // calibration: explicit line, ROI samples, or neither (input already density)
    std::optional<DensityCalibration> calibration;
    std::vector<RoiSample> calibration_rois;

    double threshold = 0.15; // g/cm^3
    Connectivity connectivity = Connectivity::Face6;
    int close_radius_vox = 1;
    double band_fraction = 0.05;

    double pmma_thickness_mm = 5.0;                      // Ensam
    std::array<double, 3> target_spacing_mm{0.984, 0.984, 0.984}; // Lyon

    double bin_step_mpa = -1.0;  // <0: variant default (Lyon 10, Ensam off)
    bool no_floor_ensam = false;
    double nu_bone_override = -1.0; // <0: variant default
    double yield_strain = 0.007;

    LoadPosition load_position = LoadPosition::AnteriorThird;
    StrainMeasure strain_measure = StrainMeasure::VonMises;
    double eps_crit = 0.015;
    double v_crit_mm3 = 1000.0;
    double reference_load_n = 1000.0;

    int increments = 20;
    double target_overall_strain = 0.019;
    double failure_strain = 0.019;

    double cg_rel_tol = 1e-10;
    double newton_tol = 1e-6;
    int newton_max_iter = 30;
};

PipelineConfig pipeline_config_from_json(const std::string& json_text);
PipelineConfig pipeline_config_from_file(const std::string& path);
std::string pipeline_config_to_json(const PipelineConfig& config);
/// FNV-1a 64-bit over the canonical JSON serialization, hex string.
std::string pipeline_config_hash(const PipelineConfig& config);

struct PipelineResult {
    std::string json;          // full record, deterministic byte-for-byte
    double failure_load_n = 0.0;
};

/// calibrate (optional) -> segment -> mesh -> materials -> solve -> failure.
PipelineResult run_pipeline(const PipelineConfig& config, const VoxelGrid& input,
                            const std::string& specimen);

// CLI entry points (shared between tools/ and the test suites).
int cmd_phantom(const std::string& spec_path, const std::string& out_path,
                const std::string& truth_path);
int cmd_calibrate(const std::string& grid_path, const std::string& rois_path,
                  const std::string& out_path);
int cmd_segment(const std::string& grid_path, double tau, Connectivity conn,
                int close_radius, const std::string& out_path);
int cmd_mesh(const std::string& grid_path, const std::string& mask_path,
             const std::string& kind, const std::string& out_path);
int cmd_pipeline(const std::string& config_path, const std::string& grid_path,
                 const std::string& out_path, const std::string& specimen);
int cmd_stats(const std::string& table_path, const std::string& out_dir);

} // namespace vertfe
