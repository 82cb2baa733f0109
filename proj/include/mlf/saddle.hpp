#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlf/assembly.hpp"

namespace mlf {

struct SaddleSolution {
    Vec phi;
    Vec pi;
    double residual_mom = 0.0;  // ||A phi + B^T pi - f||
    double residual_con = 0.0;  // ||B phi - g||
};

class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what, std::vector<double> history = {})
        : std::runtime_error(what), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

/// Sparse direct factorization of the full KKT matrix [A B^T; B 0], reusable
/// across right-hand sides. An iterative BiCGSTAB pass backs it up if the
/// factorization reports failure.
class SaddleSolver {
  public:
    SaddleSolver(const SpMat& A, const SpMat& B) : A_(A), B_(B) {
        n_ = static_cast<int>(A.rows());
        m_ = static_cast<int>(B.rows());
        std::vector<Triplet> trips;
        trips.reserve(A.nonZeros() + 2 * B.nonZeros());
        for (int k = 0; k < A.outerSize(); ++k)
            for (SpMat::InnerIterator it(A, k); it; ++it)
                trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
        for (int k = 0; k < B.outerSize(); ++k)
            for (SpMat::InnerIterator it(B, k); it; ++it) {
                trips.emplace_back(n_ + static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
                trips.emplace_back(static_cast<int>(it.col()), n_ + static_cast<int>(it.row()),
                                   it.value());
            }
        kkt_.resize(n_ + m_, n_ + m_);
        kkt_.setFromTriplets(trips.begin(), trips.end());
        kkt_.makeCompressed();
        lu_.compute(kkt_);
        direct_ok_ = (lu_.info() == Eigen::Success);
    }

    SaddleSolution solve(const Vec& f, const Vec& g) const {
        if (f.size() != n_ || g.size() != m_)
            throw std::invalid_argument("SaddleSolver::solve: right-hand side size mismatch");
        Vec rhs(n_ + m_);
        rhs.head(n_) = f;
        rhs.tail(m_) = g;

        Vec sol;
        if (direct_ok_) {
            sol = lu_.solve(rhs);
        } else {
            sol = iterative_fallback(rhs);
        }

        SaddleSolution out;
        out.phi = sol.head(n_);
        out.pi = sol.tail(m_);
        out.residual_mom = (A_ * out.phi + B_.transpose() * out.pi - f).norm();
        out.residual_con = (B_ * out.phi - g).norm();

        const double tol_rel = 1e-10, tol_abs = 1e-10;
        const double fn = f.norm();
        if (out.residual_mom > tol_rel * (fn > 0 ? fn : 1.0) + tol_abs ||
            out.residual_con > tol_abs + tol_rel * (fn > 0 ? fn : 1.0)) {
            std::ostringstream msg;
            msg << "SaddleSolver: solution residuals exceed tolerance (momentum "
                << out.residual_mom << ", constraint " << out.residual_con << ")";
            throw SolverError(msg.str(), {out.residual_mom, out.residual_con});
        }
        return out;
    }

    bool used_direct() const { return direct_ok_; }

  private:
    Vec iterative_fallback(const Vec& rhs) const {
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> it;
        it.setMaxIterations(200);
        it.setTolerance(1e-12);
        it.compute(kkt_);
        if (it.info() != Eigen::Success)
            throw SolverError(
                "SaddleSolver: direct factorization of the KKT matrix failed (momentum/constraint "
                "blocks) and no iterative preconditioner could be built");
        Vec x = Vec::Zero(rhs.size());
        std::vector<double> history;
        for (int round = 0; round < 20; ++round) {
            x = it.solveWithGuess(rhs, x);
            history.push_back(it.error());
            if (it.error() < 1e-12) return x;
        }
        throw SolverError("SaddleSolver: iterative fallback did not converge", history);
    }

    SpMat A_, B_, kkt_;
    Eigen::SparseLU<SpMat> lu_;
    int n_ = 0, m_ = 0;
    bool direct_ok_ = false;
};

/// One-shot solve of an assembled saddle system. Residuals in the returned
/// solution are recomputed from the inputs.
inline SaddleSolution solve_saddle(const SaddleSystem& sys) {
    return SaddleSolver(sys.A, sys.B).solve(sys.f, sys.g);
}

}  // namespace mlf
