#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rdinv/errors.hpp"

namespace rdinv {

/// Observable interval J = [lo, hi] of a univariate unknown. During an
/// inversion it is derived from data extrema, never hand-set.
struct RangeInterval {
    double lo = 0.0;
    double hi = 1.0;

    RangeInterval() = default;
    RangeInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo < hi)) throw std::invalid_argument("RangeInterval: lo must be < hi");
    }
    double width() const { return hi - lo; }
    bool contains(double xi) const { return xi >= lo && xi <= hi; }
};

/// max{lo, min{hi, xi}}.
inline double clamp(double xi, const RangeInterval& J) {
    return xi < J.lo ? J.lo : (xi > J.hi ? J.hi : xi);
}

/// Comparison snapshot: 100 uniform abscissae spanning J plus values.
struct StoredProfile {
    static constexpr int kPoints = 100;
    std::vector<double> abscissae;
    std::vector<double> values;
};

/// Univariate function on a compact interval J represented as a sum of
/// uniformly spaced Gaussian bumps, extended by its endpoint values outside
/// J. Evaluation clamps the argument into J, so the function is continuous
/// on all of R and its derivative vanishes identically outside J.
///
/// Immutable after construction; fitting produces new values.
class RangedFn {
public:
    static constexpr int kDefaultCenters = 40;
    static constexpr double kWidthFactor = 1.5;  // sigma = 1.5 * center spacing
    // The uniform lattice continues kPad centers past each endpoint so the
    // edge rolloff of the bump sum falls outside J.
    static constexpr int kPad = 4;

    RangedFn();

    /// Zero function on J.
    static RangedFn zero(const RangeInterval& J, int ncenters = kDefaultCenters);

    /// Explicit construction from basis components (mainly for tests); the
    /// centers span J exactly, without lattice padding.
    static RangedFn from_components(const RangeInterval& J, std::vector<double> coeffs,
                                    double sigma);

    /// Regularized least squares min |Ac-y|^2 + mu |c|^2 over the Gaussian
    /// design matrix. Abscissae are clamped into J first; duplicate or
    /// non-monotone abscissae are fine (least-squares averaging).
    /// ridge < 0 selects the default mu = 1e-8 * trace(A^T A) / ncenters.
    /// Throws RankDeficient when mu == 0 and some center receives no data.
    static RangedFn fit_from_pairs(std::span<const double> abscissae,
                                   std::span<const double> values, const RangeInterval& J,
                                   int ncenters = kDefaultCenters, double ridge = -1.0);

    double operator()(double xi) const;
    double derivative(double xi) const;

    /// Value and derivative in one pass (shared kernel evaluations).
    void eval(double xi, double& value, double& deriv) const;

    /// Re-centers the basis on Jnew and refits to this function's samples,
    /// keeping the constant extension elsewhere.
    RangedFn refreshed(const RangeInterval& Jnew) const;

    StoredProfile profile() const;

    const RangeInterval& interval() const { return interval_; }
    /// Total lattice size including padding.
    int ncenters() const { return static_cast<int>(coeffs_.size()); }
    std::span<const double> coeffs() const { return coeffs_; }
    double sigma() const { return sigma_; }

    /// Number of evaluations whose raw argument fell outside J (and was
    /// clamped). Shared across copies of this function.
    std::uint64_t clamp_events() const { return clamp_count_->load(std::memory_order_relaxed); }
    void reset_clamp_events() const { clamp_count_->store(0, std::memory_order_relaxed); }

private:
    RangedFn(const RangeInterval& J, std::vector<double> coeffs, double sigma,
             double center0, double spacing);

    double center(int k) const { return center0_ + k * spacing_; }

    RangeInterval interval_{0.0, 1.0};
    double center0_ = 0.0;
    std::vector<double> coeffs_;
    double sigma_ = 1.0;
    double spacing_ = 1.0;
    int window_ = 1;
    std::vector<double> gauss_table_;  // exp(-(m*spacing)^2 / (2 sigma^2)), m = 0..window
    std::shared_ptr<std::atomic<std::uint64_t>> clamp_count_;
};

}  // namespace rdinv
