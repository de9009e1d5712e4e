#pragma once

#include <string>
#include <vector>

#include "vertfe/fem.hpp"
#include "vertfe/mesh.hpp"

namespace vertfe {

struct FailureResult {
    double failure_load_n = 0.0;
    ModelVariant criterion = ModelVariant::Ensam;
    // Ensam detail
    double scale_factor = 0.0;        // lambda* applied to the reference load
    int triggering_element = -1;
    double triggering_volume_mm3 = 0.0;
    // Lyon detail
    double curve_strain = 0.0;        // interpolation point
};

/// Linear-scaling sweep: activate bone elements by descending equivalent
/// strain (ties by element id), track face-adjacent component volumes with
/// union-find; the first activation pushing a component past v_crit fixes
/// lambda* = eps_crit / (strain of that element) and the failure load
/// lambda* * F0.
FailureResult ensam_failure_load(const Mesh& mesh,
                                 const std::vector<double>& eq_strain,
                                 double reference_load_n,
                                 double eps_crit = 0.015,
                                 double v_crit_mm3 = 1000.0);

/// Reaction at the target overall strain, linearly interpolated between
/// bracketing increments.
FailureResult lyon_failure_load(const ReactionCurve& curve, double target = 0.019);

/// Face-adjacency (shared complete face: hex quad / tet corner triangle).
std::vector<std::vector<int>> element_face_adjacency(const Mesh& mesh);

} // namespace vertfe
