#pragma once

// Frequency-domain representation of sampled periodic curves.
//
// Coefficients are stored for the symmetric frequency range l = -L..L with
// L = (n - 1) / 2, column index l + L. The transform uses the zero-based
// convention c_l = (1/n) sum_m x_m exp(-2 pi i m l / n), m = 0..n-1.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace shiftest {

using Complex = std::complex<double>;

/// J curves sampled at t_i = i T / n, i = 0..n-1. Row j holds curve j.
class CurveSet {
public:
    CurveSet(Eigen::MatrixXd samples, double period);

    const Eigen::MatrixXd& samples() const { return samples_; }
    double period() const { return period_; }
    int curves() const { return static_cast<int>(samples_.rows()); }
    int length() const { return static_cast<int>(samples_.cols()); }
    double time(int i) const { return period_ * i / length(); }

private:
    Eigen::MatrixXd samples_;
    double period_;
};

/// Per-curve DFT coefficients d_{jl}, l = -L..L.
class SpectralTable {
public:
    explicit SpectralTable(Eigen::MatrixXcd coeffs);

    const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
    int curves() const { return static_cast<int>(coeffs_.rows()); }
    int cutoff() const { return static_cast<int>(coeffs_.cols() - 1) / 2; }
    /// Number of time samples the table came from (2L + 1).
    int length() const { return static_cast<int>(coeffs_.cols()); }

    Complex at(int curve, int l) const { return coeffs_(curve, l + cutoff()); }

private:
    Eigen::MatrixXcd coeffs_;
};

/// Forward DFT of one real curve of odd length n. Throws InputError on even n.
std::vector<Complex> forward_dft(std::span<const double> curve);

/// Inverse of forward_dft. Input must be Hermitian (c_{-l} = conj(c_l));
/// only l >= 0 is read.
std::vector<double> inverse_dft(std::span<const Complex> coeffs);

SpectralTable transform(const CurveSet& curves);

/// Reconstructs the J curves from a table (inverse_dft row by row).
Eigen::MatrixXd reconstruct(const SpectralTable& table);

/// c~_{jl}(alpha) = exp(i l alpha_j) d_{jl}; alpha has one entry per curve.
SpectralTable rephase(const SpectralTable& table, const Eigen::VectorXd& alpha);

/// c^_l(alpha) = (1/J) sum_j c~_{jl}(alpha), indexed l + L.
Eigen::VectorXcd mean_rephased(const SpectralTable& table, const Eigen::VectorXd& alpha);

/// Curves resampled by exact spectral phase shift: row j is curve j moved by
/// -alpha_j (radians), i.e. reconstruct(rephase(table, alpha)).
Eigen::MatrixXd realign(const SpectralTable& table, const Eigen::VectorXd& alpha);

}  // namespace shiftest
