#include <cstdio>

#include "geosub/geosub.hpp"

// Certify a symbol that mixes a real factor with a conjugate complex pair,
// then sample the boundary of the non-certifiable region for its mu1.

int main() {
    using namespace geosub;

    SymbolFactorization f;
    f.shift = 0;
    f.real_alphas = {1.0};
    f.quadratic_alphas = {cdouble(1.0, 0.5)};

    const Mask mask = reconstruct(f);
    std::printf("mask:");
    for (double c : mask.coefficients()) std::printf(" %.6f", c);
    std::printf("  (first index %d)\n", mask.first_index());

    const ConvergenceReport report = contractivity(f);
    std::printf("mu1 = %.6f\n", *report.mu1);
    for (const XiFactor& x : report.xi_factors)
        std::printf("xi(%.3f%+.3fi) = %.6f\n", x.alpha.real(), x.alpha.imag(), x.value);
    std::printf("mu  = %.6f -> %s\n", *report.mu,
                report.verdict == Verdict::certified_convergent ? "certified-convergent" : "not-certified");
    std::printf("displacement constant K = %.2f\n", report.displacement_K);

    std::printf("omega boundary samples for mu1 = %.2f (upsilon = %.5f):\n", *report.mu1, upsilon(*report.mu1));
    for (const OmegaBoundarySample& row : omega_boundary(*report.mu1, 5))
        std::printf("  phi = %.4f  rho1 = %.5f  rho2 = %.5f\n", row.phi, row.rho1, row.rho2);
    return 0;
}
