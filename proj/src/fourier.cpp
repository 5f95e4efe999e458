#include "shiftest/fourier.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

// FFTW planning is not thread-safe; execution on new arrays is. Plans are
// created once per length under a lock and then shared.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.backward);
        }
    }

    const PlanPair& get(int n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;

        const int half = n / 2 + 1;
        std::unique_ptr<double, decltype(&fftw_free)> real(fftw_alloc_real(n), &fftw_free);
        std::unique_ptr<fftw_complex, decltype(&fftw_free)> cplx(fftw_alloc_complex(half),
                                                                 &fftw_free);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair p;
        p.forward = fftw_plan_dft_r2c_1d(n, real.get(), cplx.get(), flags);
        p.backward = fftw_plan_dft_c2r_1d(n, cplx.get(), real.get(), flags | FFTW_DESTROY_INPUT);
        return plans_.emplace(n, p).first->second;
    }

private:
    std::mutex mutex_;
    std::map<int, PlanPair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void require_odd(std::size_t n) {
    if (n < 3) throw InputError("transform needs at least 3 samples, got " + std::to_string(n));
    if (n % 2 == 0)
        throw InputError("transform needs an odd number of samples, got " + std::to_string(n) +
                         "; drop the last sample to use this data");
}

}  // namespace

CurveSet::CurveSet(Eigen::MatrixXd samples, double period)
    : samples_(std::move(samples)), period_(period) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
        throw InputError("period must be positive and finite");
    if (samples_.rows() < 2) throw InputError("need at least 2 curves");
    if (samples_.cols() < 3) throw InputError("need at least 3 samples per curve");
    if (!samples_.allFinite()) throw InputError("curve samples must be finite");
}

SpectralTable::SpectralTable(Eigen::MatrixXcd coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.cols() % 2 == 0 || coeffs_.cols() < 3)
        throw InputError("spectral table needs an odd frequency count >= 3");
    if (coeffs_.rows() < 1) throw InputError("spectral table needs at least one curve");
}

std::vector<Complex> forward_dft(std::span<const double> curve) {
    const std::size_t n = curve.size();
    require_odd(n);
    for (double v : curve)
        if (!std::isfinite(v)) throw InputError("curve samples must be finite");

    const int L = static_cast<int>(n - 1) / 2;
    std::vector<double> in(curve.begin(), curve.end());
    std::vector<Complex> half(static_cast<std::size_t>(L) + 1);
    fftw_execute_dft_r2c(plan_cache().get(static_cast<int>(n)).forward, in.data(),
                         reinterpret_cast<fftw_complex*>(half.data()));

    std::vector<Complex> out(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (int l = 0; l <= L; ++l) {
        const Complex c = half[l] * scale;
        out[L + l] = c;
        out[L - l] = std::conj(c);
    }
    out[L] = Complex(out[L].real(), 0.0);
    return out;
}

std::vector<double> inverse_dft(std::span<const Complex> coeffs) {
    const std::size_t n = coeffs.size();
    require_odd(n);
    const int L = static_cast<int>(n - 1) / 2;
    std::vector<Complex> half(coeffs.begin() + L, coeffs.end());
    half[0] = Complex(half[0].real(), 0.0);
    std::vector<double> out(n);
    fftw_execute_dft_c2r(plan_cache().get(static_cast<int>(n)).backward,
                         reinterpret_cast<fftw_complex*>(half.data()), out.data());
    return out;
}

SpectralTable transform(const CurveSet& curves) {
    const int J = curves.curves();
    const int n = curves.length();
    require_odd(static_cast<std::size_t>(n));
    Eigen::MatrixXcd coeffs(J, n);
    std::vector<double> row(n);
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < n; ++i) row[i] = curves.samples()(j, i);
        const auto c = forward_dft(row);
        for (int k = 0; k < n; ++k) coeffs(j, k) = c[k];
    }
    return SpectralTable(std::move(coeffs));
}

Eigen::MatrixXd reconstruct(const SpectralTable& table) {
    const int J = table.curves();
    const int n = table.length();
    Eigen::MatrixXd out(J, n);
    std::vector<Complex> row(n);
    for (int j = 0; j < J; ++j) {
        for (int k = 0; k < n; ++k) row[k] = table.coeffs()(j, k);
        const auto x = inverse_dft(row);
        for (int i = 0; i < n; ++i) out(j, i) = x[i];
    }
    return out;
}

SpectralTable rephase(const SpectralTable& table, const Eigen::VectorXd& alpha) {
    const int J = table.curves();
    const int L = table.cutoff();
    if (alpha.size() != J) throw InputError("rephase: one phase per curve expected");
    if (!alpha.allFinite()) throw InputError("rephase: phases must be finite");
    Eigen::MatrixXcd out(J, table.length());
    for (int j = 0; j < J; ++j)
        for (int l = -L; l <= L; ++l)
            out(j, l + L) = std::polar(1.0, l * alpha[j]) * table.at(j, l);
    return SpectralTable(std::move(out));
}

Eigen::VectorXcd mean_rephased(const SpectralTable& table, const Eigen::VectorXd& alpha) {
    return rephase(table, alpha).coeffs().colwise().mean().transpose();
}

Eigen::MatrixXd realign(const SpectralTable& table, const Eigen::VectorXd& alpha) {
    return reconstruct(rephase(table, alpha));
}

}  // namespace shiftest
