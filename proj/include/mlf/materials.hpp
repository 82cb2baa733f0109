#pragma once

#include <stdexcept>
#include <string>

namespace mlf {

/// Physical constants of the three-layer system. All must be strictly
/// positive: the solver targets the inertial, non-degenerate regime, and
/// gamma keeps the plate operator coercive.
struct MaterialParams {
    // Biot bulk
    double lambda_b = 1.0;
    double mu_b = 1.0;
    double rho_b = 1.0;
    double alpha_b = 1.0;
    double c_b = 1.0;
    double k_b = 1.0;
    // poroelastic plate
    double d_plate = 1.0;
    double gamma = 1.0;
    double rho_p = 1.0;
    double alpha_p = 1.0;
    double c_p = 1.0;
    double k_p = 1.0;
    // fluid
    double rho_f = 1.0;
    double mu_f = 1.0;
    // interface slip
    double beta_bjs = 1.0;

    void validate() const {
        const auto need = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string(name) +
                                            ": must be strictly positive (non-degenerate regime)");
        };
        need(lambda_b, "lambda_b");
        need(mu_b, "mu_b");
        need(rho_b, "rho_b");
        need(alpha_b, "alpha_b");
        need(c_b, "c_b");
        need(k_b, "k_b");
        need(d_plate, "d_plate");
        need(gamma, "gamma");
        need(rho_p, "rho_p");
        need(alpha_p, "alpha_p");
        need(c_p, "c_p");
        need(k_p, "k_p");
        need(rho_f, "rho_f");
        need(mu_f, "mu_f");
        need(beta_bjs, "beta_bjs");
    }
};

}  // namespace mlf
