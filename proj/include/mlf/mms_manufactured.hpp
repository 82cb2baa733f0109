#pragma once

// Generated by tools/generate_mms.py. Do not edit by hand; rerun the
// script to change the manufactured solution.

#include <cmath>

#include "mlf/assembly.hpp"
#include "mlf/materials.hpp"

namespace mlf {

/// Closed-form manufactured solution of the lambda = 1 reduced problem
/// and the matching data fields; every essential and natural interface
/// identity holds exactly for these expressions.
class ManufacturedCase {
  public:
    explicit ManufacturedCase(const MaterialParams& prm_in, double h_in = 0.2)
        : prm(prm_in), h(h_in) {
        lam_b = prm.lambda_b; mu_b = prm.mu_b; rho_b = prm.rho_b;
        alpha_b = prm.alpha_b; c_b = prm.c_b; k_b = prm.k_b;
        Dp = prm.d_plate; gma = prm.gamma; rho_p = prm.rho_p;
        alpha_p = prm.alpha_p; c_p = prm.c_p; k_p = prm.k_p;
        rho_f = prm.rho_f; mu_f = prm.mu_f;
    }

    MaterialParams prm;
    double h;

    double eta1(double x, double y, double z) const {
        return (1.0/5.0)*z*(1 - z)*sin(2*M_PI*y);
    }

    double eta2(double x, double y, double z) const {
        return 0;
    }

    double eta3(double x, double y, double z) const {
        return (3.0/10.0)*(pow(z, 2) - 2*z + 1)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2);
    }

    double zeta1(double x, double y, double z) const {
        return (1.0/4.0)*z*(1 - z)*sin(2*M_PI*y);
    }

    double zeta2(double x, double y, double z) const {
        return 0;
    }

    double zeta3(double x, double y, double z) const {
        return 0;
    }

    double pb(double x, double y, double z) const {
        return (2.0/5.0)*h*(h*k_b*(1 - pow(z, 2)) - 2*k_p*pow(z, 2) + 2*k_p*z)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2)/k_b;
    }

    double w(double x, double y) const {
        return (3.0/10.0)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2);
    }

    double w_x(double x, double y) const {
        return (3.0/5.0)*M_PI*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x);
    }

    double w_y(double x, double y) const {
        return (3.0/5.0)*M_PI*pow(sin(M_PI*x), 2)*sin(M_PI*y)*cos(M_PI*y);
    }

    double w_xy(double x, double y) const {
        return (3.0/20.0)*pow(M_PI, 2)*(cos(M_PI*(2*x - 2*y)) - cos(M_PI*(2*x + 2*y)));
    }

    double v(double x, double y) const {
        return 0;
    }

    double pp(double x, double y, double s) const {
        return (1.0/10.0)*(pow(h, 2) + 4*h*s + 4*pow(s, 2))*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2);
    }

    double u1(double x, double y, double z) const {
        return (3.0/10.0)*pow(z, 2)*(5*pow(z, 2) + 8*z + 3)*sin(2*M_PI*x);
    }

    double u2(double x, double y, double z) const {
        return 0;
    }

    double u3(double x, double y, double z) const {
        return (3.0/5.0)*M_PI*pow(z, 3)*(-pow(z, 2) - 2*z - 1)*cos(2*M_PI*x);
    }

    double pi_f(double x, double y, double z) const {
        return (7.0/20.0)*z*(z + 1)*cos(2*M_PI*x);
    }

    double f1_1(double x, double y, double z) const {
        return (1.0/20.0)*z*(z - 1)*sin(2*M_PI*y);
    }

    double f1_2(double x, double y, double z) const {
        return 0;
    }

    double f1_3(double x, double y, double z) const {
        return (3.0/10.0)*(pow(z, 2) - 2*z + 1)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2);
    }

    double div_f1(double x, double y, double z) const {
        return (3.0/5.0)*(z - 1)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2);
    }

    double f2_1(double x, double y, double z) const {
        return (1.0/20.0)*(32*M_PI*alpha_b*h*k_p*z*(1 - z)*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) + 5*k_b*rho_b*z*(1 - z)*sin(2*M_PI*y) + 8*k_b*(-2*M_PI*alpha_b*pow(h, 2)*pow(z, 2)*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) + 2*M_PI*alpha_b*pow(h, 2)*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) - 3*M_PI*lam_b*z*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) + 3*M_PI*lam_b*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) - 2*pow(M_PI, 2)*mu_b*pow(z, 2)*sin(2*M_PI*y) - 3*M_PI*mu_b*z*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) + 2*pow(M_PI, 2)*mu_b*z*sin(2*M_PI*y) + 3*M_PI*mu_b*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x) + mu_b*sin(2*M_PI*y)))/(k_b*rho_b);
    }

    double f2_2(double x, double y, double z) const {
        return (2.0/5.0)*M_PI*(4*alpha_b*h*k_p*z*(1 - z) + k_b*(-2*alpha_b*pow(h, 2)*pow(z, 2) + 2*alpha_b*pow(h, 2) - 3*lam_b*z + 3*lam_b - 3*mu_b*z + 3*mu_b))*pow(sin(M_PI*x), 2)*sin(M_PI*y)*cos(M_PI*y)/(k_b*rho_b);
    }

    double f2_3(double x, double y, double z) const {
        return (1.0/5.0)*(4*alpha_b*h*k_p*(1 - 2*z)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + k_b*(-4*alpha_b*pow(h, 2)*z*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - 3*lam_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 12*pow(M_PI, 2)*mu_b*pow(z, 2)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - 3*pow(M_PI, 2)*mu_b*pow(z, 2)*pow(sin(M_PI*x), 2) - 3*pow(M_PI, 2)*mu_b*pow(z, 2)*pow(sin(M_PI*y), 2) - 24*pow(M_PI, 2)*mu_b*z*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 6*pow(M_PI, 2)*mu_b*z*pow(sin(M_PI*x), 2) + 6*pow(M_PI, 2)*mu_b*z*pow(sin(M_PI*y), 2) - 6*mu_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 12*pow(M_PI, 2)*mu_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - 3*pow(M_PI, 2)*mu_b*pow(sin(M_PI*x), 2) - 3*pow(M_PI, 2)*mu_b*pow(sin(M_PI*y), 2)))/(k_b*rho_b);
    }

    double f3(double x, double y, double z) const {
        return (2.0/5.0)*h*(c_b*h*k_b*(1 - pow(z, 2))*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 2*c_b*k_p*z*(1 - z)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 2*k_b*(-4*pow(M_PI, 2)*h*k_b*pow(z, 2)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + pow(M_PI, 2)*h*k_b*pow(z, 2)*pow(sin(M_PI*x), 2) + pow(M_PI, 2)*h*k_b*pow(z, 2)*pow(sin(M_PI*y), 2) + h*k_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 4*pow(M_PI, 2)*h*k_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - pow(M_PI, 2)*h*k_b*pow(sin(M_PI*x), 2) - pow(M_PI, 2)*h*k_b*pow(sin(M_PI*y), 2) - 8*pow(M_PI, 2)*k_p*pow(z, 2)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 2*pow(M_PI, 2)*k_p*pow(z, 2)*pow(sin(M_PI*x), 2) + 2*pow(M_PI, 2)*k_p*pow(z, 2)*pow(sin(M_PI*y), 2) + 8*pow(M_PI, 2)*k_p*z*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - 2*pow(M_PI, 2)*k_p*z*pow(sin(M_PI*x), 2) - 2*pow(M_PI, 2)*k_p*z*pow(sin(M_PI*y), 2) + 2*k_p*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2)))/(c_b*k_b);
    }

    double f4(double x, double y) const {
        return (3.0/10.0)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2);
    }

    double f4_dx(double x, double y) const {
        return (3.0/5.0)*M_PI*sin(M_PI*x)*pow(sin(M_PI*y), 2)*cos(M_PI*x);
    }

    double f4_dy(double x, double y) const {
        return (3.0/5.0)*M_PI*pow(sin(M_PI*x), 2)*sin(M_PI*y)*cos(M_PI*y);
    }

    double f4_dxy(double x, double y) const {
        return (3.0/20.0)*pow(M_PI, 2)*(cos(M_PI*(2*x - 2*y)) - cos(M_PI*(2*x + 2*y)));
    }

    double lap_f4(double x, double y) const {
        return (3.0/5.0)*pow(M_PI, 2)*(-4*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + pow(sin(M_PI*x), 2) + pow(sin(M_PI*y), 2));
    }

    double f5(double x, double y) const {
        return (1.0/30.0)*(576*pow(M_PI, 4)*Dp*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - 216*pow(M_PI, 4)*Dp*pow(sin(M_PI*x), 2) - 216*pow(M_PI, 4)*Dp*pow(sin(M_PI*y), 2) + 72*pow(M_PI, 4)*Dp + 12*alpha_b*pow(h, 2)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) - 8*pow(M_PI, 2)*alpha_p*pow(h, 4)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 2*pow(M_PI, 2)*alpha_p*pow(h, 4)*pow(sin(M_PI*x), 2) + 2*pow(M_PI, 2)*alpha_p*pow(h, 4)*pow(sin(M_PI*y), 2) + 9*gma*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 18*lam_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2) + 36*mu_b*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2))/rho_p;
    }

    double f6(double x, double y, double s) const {
        return (1.0/10.0)*(c_p*(pow(h, 2) + 4*h*s + 4*pow(s, 2)) - 8*k_p)*pow(sin(M_PI*x), 2)*pow(sin(M_PI*y), 2)/c_p;
    }

    double f7_1(double x, double y, double z) const {
        return (1.0/10.0)*(60*pow(M_PI, 2)*mu_f*pow(z, 4) + 96*pow(M_PI, 2)*mu_f*pow(z, 3) - 180*mu_f*pow(z, 2) + 36*pow(M_PI, 2)*mu_f*pow(z, 2) - 144*mu_f*z - 18*mu_f + 3*rho_f*pow(z, 2)*(5*pow(z, 2) + 8*z + 3) - 7*M_PI*pow(z, 2) - 7*M_PI*z)*sin(2*M_PI*x)/rho_f;
    }

    double f7_2(double x, double y, double z) const {
        return 0;
    }

    double f7_3(double x, double y, double z) const {
        return (1.0/20.0)*(-48*pow(M_PI, 3)*mu_f*pow(z, 5) - 96*pow(M_PI, 3)*mu_f*pow(z, 4) - 48*pow(M_PI, 3)*mu_f*pow(z, 3) + 240*M_PI*mu_f*pow(z, 3) + 288*M_PI*mu_f*pow(z, 2) + 72*M_PI*mu_f*z - 12*M_PI*rho_f*pow(z, 3)*(pow(z, 2) + 2*z + 1) + 14*z + 7)*cos(2*M_PI*x)/rho_f;
    }

    /// Analytic data closures for the resolvent functional.
    ResolventData data() const {
        ResolventData d;
        d.f1[0] = [this](double x, double y, double z) { return f1_1(x, y, z); };
        d.f2[0] = [this](double x, double y, double z) { return f2_1(x, y, z); };
        d.f7[0] = [this](double x, double y, double z) { return f7_1(x, y, z); };
        d.f1[1] = [this](double x, double y, double z) { return f1_2(x, y, z); };
        d.f2[1] = [this](double x, double y, double z) { return f2_2(x, y, z); };
        d.f7[1] = [this](double x, double y, double z) { return f7_2(x, y, z); };
        d.f1[2] = [this](double x, double y, double z) { return f1_3(x, y, z); };
        d.f2[2] = [this](double x, double y, double z) { return f2_3(x, y, z); };
        d.f7[2] = [this](double x, double y, double z) { return f7_3(x, y, z); };
        d.div_f1 = [this](double x, double y, double z) { return div_f1(x, y, z); };
        d.f3 = [this](double x, double y, double z) { return f3(x, y, z); };
        d.f4 = [this](double x, double y) { return f4(x, y); };
        d.f4_dx = [this](double x, double y) { return f4_dx(x, y); };
        d.f4_dy = [this](double x, double y) { return f4_dy(x, y); };
        d.f4_dxy = [this](double x, double y) { return f4_dxy(x, y); };
        d.lap_f4 = [this](double x, double y) { return lap_f4(x, y); };
        d.f5 = [this](double x, double y) { return f5(x, y); };
        d.f6 = [this](double x, double y, double s) { return f6(x, y, s); };
        return d;
    }

  private:
    double lam_b, mu_b, rho_b, alpha_b, c_b, k_b;
    double Dp, gma, rho_p, alpha_p, c_p, k_p;
    double rho_f, mu_f;
};

}  // namespace mlf
