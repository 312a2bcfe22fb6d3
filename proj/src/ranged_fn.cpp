#include "rdinv/ranged_fn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace rdinv {

namespace {

double interior_spacing(const RangeInterval& J, int ncenters) {
    return ncenters > 1 ? J.width() / (ncenters - 1) : J.width();
}

}  // namespace

RangedFn::RangedFn()
    : RangedFn(RangeInterval{0.0, 1.0}, std::vector<double>(2, 0.0), 1.5, 0.0, 1.0) {}

RangedFn::RangedFn(const RangeInterval& J, std::vector<double> coeffs, double sigma,
                   double center0, double spacing)
    : interval_(J),
      coeffs_(std::move(coeffs)),
      sigma_(sigma),
      spacing_(spacing),
      center0_(center0),
      clamp_count_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    if (coeffs_.empty()) throw std::invalid_argument("RangedFn: need at least one center");
    // Window beyond which a bump contributes below 1e-18 of its peak.
    const double ratio = sigma_ / spacing_;
    window_ = std::min<int>(static_cast<int>(coeffs_.size()),
                            static_cast<int>(std::ceil(9.2 * ratio)) + 1);
    gauss_table_.resize(window_ + 1);
    for (int k = 0; k <= window_; ++k) {
        const double d = k * spacing_;
        gauss_table_[k] = std::exp(-d * d / (2.0 * sigma_ * sigma_));
    }
}

RangedFn RangedFn::zero(const RangeInterval& J, int ncenters) {
    if (ncenters < 2) throw std::invalid_argument("RangedFn: ncenters must be >= 2");
    const double s = interior_spacing(J, ncenters);
    return RangedFn(J, std::vector<double>(ncenters + 2 * kPad, 0.0), kWidthFactor * s,
                    J.lo - kPad * s, s);
}

RangedFn RangedFn::from_components(const RangeInterval& J, std::vector<double> coeffs,
                                   double sigma) {
    const int m = static_cast<int>(coeffs.size());
    if (m < 1) throw std::invalid_argument("RangedFn: need at least one center");
    const double s = interior_spacing(J, m);
    const double c0 = m > 1 ? J.lo : 0.5 * (J.lo + J.hi);
    return RangedFn(J, std::move(coeffs), sigma > 0.0 ? sigma : kWidthFactor * s, c0, s);
}

void RangedFn::eval(double xi, double& value, double& deriv) const {
    const bool outside = xi < interval_.lo || xi > interval_.hi;
    if (outside) clamp_count_->fetch_add(1, std::memory_order_relaxed);
    const double xc = clamp(xi, interval_);

    const int m = static_cast<int>(coeffs_.size());
    const double inv_sigma2 = 1.0 / (sigma_ * sigma_);
    int kc = m > 1 ? static_cast<int>(std::lround((xc - center0_) / spacing_)) : 0;
    kc = std::clamp(kc, 0, m - 1);
    const double delta = xc - center(kc);

    // Bump at center kc +/- j equals amp * rho^(-/+j) * gauss_table_[j] with
    // amp and rho from single exponentials; |delta| <= spacing/2 keeps rho
    // near one, so the cumulative products stay well scaled.
    const double amp = std::exp(-delta * delta * 0.5 * inv_sigma2);
    const double rho = std::exp(delta * spacing_ * inv_sigma2);

    double s = coeffs_[kc] * amp;
    double sd = s * (-delta * inv_sigma2);
    double p = amp;
    for (int j = 1; j <= window_ && kc + j < m; ++j) {
        p *= rho;
        const double e = coeffs_[kc + j] * p * gauss_table_[j];
        s += e;
        sd += e * (-(delta - j * spacing_) * inv_sigma2);
    }
    p = amp;
    const double inv_rho = 1.0 / rho;
    for (int j = 1; j <= window_ && kc - j >= 0; ++j) {
        p *= inv_rho;
        const double e = coeffs_[kc - j] * p * gauss_table_[j];
        s += e;
        sd += e * (-(delta + j * spacing_) * inv_sigma2);
    }
    value = s;
    deriv = outside ? 0.0 : sd;
}

double RangedFn::operator()(double xi) const {
    double v, d;
    eval(xi, v, d);
    return v;
}

double RangedFn::derivative(double xi) const {
    double v, d;
    eval(xi, v, d);
    return d;
}

RangedFn RangedFn::fit_from_pairs(std::span<const double> abscissae,
                                  std::span<const double> values, const RangeInterval& J,
                                  int ncenters, double ridge) {
    if (abscissae.size() != values.size())
        throw std::invalid_argument("fit_from_pairs: size mismatch");
    if (ncenters < 2) throw std::invalid_argument("fit_from_pairs: ncenters must be >= 2");
    const int n = static_cast<int>(abscissae.size());

    // Distinctness after clamping.
    {
        double first = clamp(abscissae.empty() ? J.lo : abscissae[0], J);
        bool distinct = false;
        for (int j = 1; j < n; ++j)
            if (clamp(abscissae[j], J) != first) { distinct = true; break; }
        if (n < 2 || !distinct)
            throw std::invalid_argument("fit_from_pairs: need >= 2 distinct abscissae in J");
    }

    const double spacing = interior_spacing(J, ncenters);
    const double sigma = kWidthFactor * spacing;
    const double center0 = J.lo - kPad * spacing;
    const int m = ncenters + 2 * kPad;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    const int window = static_cast<int>(std::ceil(9.2 * kWidthFactor)) + 1;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, m);
    for (int j = 0; j < n; ++j) {
        const double xc = clamp(abscissae[j], J);
        const int kc =
            std::clamp(static_cast<int>(std::lround((xc - center0) / spacing)), 0, m - 1);
        const int k0 = std::max(0, kc - window);
        const int k1 = std::min(m - 1, kc + window);
        for (int k = k0; k <= k1; ++k) {
            const double d = xc - (center0 + k * spacing);
            A(j, k) = std::exp(-d * d * inv_two_sigma2);
        }
    }

    double mu = ridge;
    const double trace = A.squaredNorm();
    if (mu < 0.0) mu = 1e-8 * trace / m;
    if (mu == 0.0) {
        for (int k = 0; k < m; ++k)
            if (A.col(k).lpNorm<Eigen::Infinity>() == 0.0)
                throw RankDeficient("fit_from_pairs: center " + std::to_string(k) +
                                    " receives no data and no ridge is active");
    }

    // QR on the ridge-augmented system; normal equations would square the
    // (large) condition number of the overlapping Gaussian design.
    Eigen::MatrixXd Aug = Eigen::MatrixXd::Zero(n + m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
    Aug.topRows(n) = A;
    rhs.head(n) = Eigen::Map<const Eigen::VectorXd>(values.data(), n);
    const double root_mu = std::sqrt(mu);
    for (int k = 0; k < m; ++k) Aug(n + k, k) = root_mu;
    Eigen::VectorXd c = Aug.colPivHouseholderQr().solve(rhs);

    std::vector<double> coeffs(c.data(), c.data() + m);
    return RangedFn(J, std::move(coeffs), sigma, center0, spacing);
}

RangedFn RangedFn::refreshed(const RangeInterval& Jnew) const {
    // Keep the center density of the old lattice so re-centering neither
    // blurs nor over-resolves the function.
    const int old_interior = std::max(2, static_cast<int>(coeffs_.size()) - 2 * kPad);
    const double density = (old_interior - 1) / interval_.width();
    const int interior =
        std::max(2, static_cast<int>(std::lround(Jnew.width() * density)) + 1);
    const int probes = std::max(256, 4 * interior);
    std::vector<double> xs(probes), ys(probes);
    for (int i = 0; i < probes; ++i) {
        xs[i] = Jnew.lo + Jnew.width() * i / (probes - 1);
        ys[i] = (*this)(xs[i]);
    }
    return fit_from_pairs(xs, ys, Jnew, interior, 1e-12);
}

StoredProfile RangedFn::profile() const {
    StoredProfile p;
    p.abscissae.resize(StoredProfile::kPoints);
    p.values.resize(StoredProfile::kPoints);
    for (int i = 0; i < StoredProfile::kPoints; ++i) {
        p.abscissae[i] =
            interval_.lo + interval_.width() * i / (StoredProfile::kPoints - 1);
        p.values[i] = (*this)(p.abscissae[i]);
    }
    return p;
}

}  // namespace rdinv
