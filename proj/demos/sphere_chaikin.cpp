#include <iostream>

#include "geosub/geosub.hpp"

// Chaikin corner cutting on a great circle: factor the mask, build a plan,
// refine, and watch the mesh size halve each step.

int main() {
    using namespace geosub;

    std::vector<ManifoldPoint> pts;
    for (int k = 0; k < 6; ++k) {
        const double t = 2.0 * M_PI * k / 6.0;
        pts.push_back(ManifoldPoint::sphere({std::cos(t), std::sin(t), 0.0}));
    }
    const Polyline circle(pts, Topology::periodic);

    const Mask chaikin = bspline_mask(2);
    const RefinementPlan plan = make_plan(factorize(chaikin), Topology::periodic);

    std::cout << "step points delta\n";
    Polyline current = circle;
    std::cout << "0 " << current.size() << " " << mesh_size(current) << "\n";
    for (int step = 1; step <= 5; ++step) {
        current = global_refine_step(current, plan).refined;
        std::cout << step << " " << current.size() << " " << mesh_size(current) << "\n";
    }

    const ConvergenceReport report = contractivity(factorize(chaikin));
    std::cout << "certified mu: " << (report.mu ? *report.mu : -1.0) << "\n";
    return 0;
}
