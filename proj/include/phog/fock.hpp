#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "params.hpp"

namespace phog {

using SpMat = Eigen::SparseMatrix<cplx>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Dims = std::vector<int>;

inline long total_dim(const Dims& dims) {
    long d = 1;
    for (int k : dims) d *= k;
    return d;
}

inline SpMat identity_op(long dim) {
    SpMat I(dim, dim);
    I.setIdentity();
    return I;
}

inline SpMat annihilation(int dim) {
    if (dim < 2) throw std::invalid_argument("Fock dimension must be at least 2");
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 1; n < dim; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
    SpMat a(dim, dim);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

inline SpMat number(int dim) {
    if (dim < 2) throw std::invalid_argument("Fock dimension must be at least 2");
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 1; n < dim; ++n) t.emplace_back(n, n, double(n));
    SpMat a(dim, dim);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

inline SpMat kron(const SpMat& A, const SpMat& B) {
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(std::size_t(A.nonZeros()) * std::size_t(B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SpMat::InnerIterator ia(A, ka); ia; ++ia)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SpMat::InnerIterator ib(B, kb); ib; ++ib)
                    t.emplace_back(ia.row() * B.rows() + ib.row(), ia.col() * B.cols() + ib.col(),
                                   ia.value() * ib.value());
    SpMat C(A.rows() * B.rows(), A.cols() * B.cols());
    C.setFromTriplets(t.begin(), t.end());
    return C;
}

// Places a single-mode operator on `mode`; mode 0 is the most significant tensor factor.
inline SpMat embed(const SpMat& op, std::size_t mode, const Dims& dims) {
    if (mode >= dims.size()) throw std::out_of_range("mode index out of range");
    if (op.rows() != dims[mode]) throw std::invalid_argument("operator dimension does not match mode");
    long left = 1, right = 1;
    for (std::size_t k = 0; k < mode; ++k) left *= dims[k];
    for (std::size_t k = mode + 1; k < dims.size(); ++k) right *= dims[k];
    SpMat r = op;
    if (left > 1) r = kron(identity_op(left), r);
    if (right > 1) r = kron(r, identity_op(right));
    return r;
}

inline SpMat adjoint(const SpMat& A) { return SpMat(A.adjoint()); }

// Occupation of each mode for a flat basis index.
inline std::vector<int> decode_index(long idx, const Dims& dims) {
    std::vector<int> occ(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        occ[k] = int(idx % dims[k]);
        idx /= dims[k];
    }
    return occ;
}

inline int adequate_dim(double mean_n) { return int(std::ceil(mean_n + 8.0 * std::sqrt(mean_n) + 10.0)); }

inline CVec coherent_state(cplx alpha, int dim, double leak_tol = 1e-6) {
    double n = std::norm(alpha);
    CVec v(dim);
    // amplitudes via logs to avoid overflow in n!
    double la = n > 0 ? std::log(std::abs(alpha)) : 0.0;
    double ph = std::arg(alpha);
    for (int k = 0; k < dim; ++k) {
        if (n == 0.0) {
            v[k] = k == 0 ? 1.0 : 0.0;
            continue;
        }
        double lm = -0.5 * n + k * la - 0.5 * std::lgamma(k + 1.0);
        v[k] = std::polar(std::exp(lm), k * ph);
    }
    if (1.0 - v.squaredNorm() > leak_tol) throw std::invalid_argument("truncation too small for coherent state");
    return v / v.norm();
}

inline CVec tensor(const std::vector<CVec>& parts) {
    CVec r = CVec::Ones(1);
    for (const auto& p : parts) {
        CVec n(r.size() * p.size());
        for (long i = 0; i < r.size(); ++i) n.segment(i * p.size(), p.size()) = r[i] * p;
        r = std::move(n);
    }
    return r;
}

struct DensityMatrix {
    Dims dims;
    CMat rho;

    static DensityMatrix pure(const CVec& psi, Dims dims) { return {std::move(dims), psi * psi.adjoint()}; }
    cplx trace() const { return rho.trace(); }
    double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
};

struct PhotonNumberDist {
    std::vector<double> p;

    double total() const { return std::accumulate(p.begin(), p.end(), 0.0); }
    double leakage() const { return 1.0 - total(); }
    double raw_moment(int k) const {
        double s = 0;
        for (std::size_t n = 0; n < p.size(); ++n) s += std::pow(double(n), k) * p[n];
        return s;
    }
    double mean() const { return raw_moment(1); }
    double central_moment(int k) const {
        double mu = mean(), s = 0;
        for (std::size_t n = 0; n < p.size(); ++n) s += std::pow(double(n) - mu, k) * p[n];
        return s;
    }
    double variance() const { return central_moment(2); }
    double mandel_q() const {
        double mu = mean();
        if (!(mu > 0.0)) throw std::domain_error("Mandel Q undefined for zero mean");
        double f2 = 0;
        for (std::size_t n = 2; n < p.size(); ++n) f2 += double(n) * double(n - 1) * p[n];
        return f2 / mu - mu;
    }
    double skewness() const { return central_moment(3) / std::pow(variance(), 1.5); }
    double excess_kurtosis() const { return central_moment(4) / (variance() * variance()) - 3.0; }
};

inline PhotonNumberDist photon_number_dist(const CMat& rho, const Dims& dims, std::size_t mode) {
    if (mode >= dims.size()) throw std::out_of_range("mode index out of range");
    PhotonNumberDist d;
    d.p.assign(dims[mode], 0.0);
    for (long i = 0; i < rho.rows(); ++i) d.p[decode_index(i, dims)[mode]] += rho(i, i).real();
    return d;
}

inline PhotonNumberDist photon_number_dist(const DensityMatrix& r, std::size_t mode) {
    return photon_number_dist(r.rho, r.dims, mode);
}

inline PhotonNumberDist photon_number_dist_pure(const CVec& psi, const Dims& dims, std::size_t mode) {
    PhotonNumberDist d;
    d.p.assign(dims[mode], 0.0);
    for (long i = 0; i < psi.size(); ++i) d.p[decode_index(i, dims)[mode]] += std::norm(psi[i]);
    return d;
}

inline double mandel_q(const PhotonNumberDist& d) { return d.mandel_q(); }

inline PhotonNumberDist thermal_dist(double mean, int dim) {
    PhotonNumberDist d;
    double r = mean / (1.0 + mean);
    for (int n = 0; n < dim; ++n) d.p.push_back(std::pow(r, n) / (1.0 + mean));
    return d;
}

inline DensityMatrix partial_trace(const DensityMatrix& r, const std::vector<std::size_t>& keep) {
    std::vector<bool> kept(r.dims.size(), false);
    for (auto k : keep) {
        if (k >= r.dims.size() || kept[k]) throw std::invalid_argument("bad mode set for partial trace");
        kept[k] = true;
    }
    Dims kd;
    for (auto k : keep) kd.push_back(r.dims[k]);
    long dk = total_dim(kd);
    CMat out = CMat::Zero(dk, dk);
    long D = total_dim(r.dims);
    auto reduced = [&](const std::vector<int>& occ) {
        long idx = 0;
        for (auto k : keep) idx = idx * r.dims[k] + occ[k];
        return idx;
    };
    auto traced_equal = [&](const std::vector<int>& a, const std::vector<int>& b) {
        for (std::size_t k = 0; k < a.size(); ++k)
            if (!kept[k] && a[k] != b[k]) return false;
        return true;
    };
    std::vector<std::vector<int>> occ(D);
    for (long i = 0; i < D; ++i) occ[i] = decode_index(i, r.dims);
    for (long i = 0; i < D; ++i)
        for (long j = 0; j < D; ++j)
            if (traced_equal(occ[i], occ[j])) out(reduced(occ[i]), reduced(occ[j])) += r.rho(i, j);
    return {kd, out};
}

// First and second moments of a set of modes: alpha_k = <x_k>, N_kl = <x_k^dag x_l>, M_kl = <x_k x_l> (raw).
struct ModeMoments {
    CVec alpha;
    CMat N, M;
};

inline ModeMoments moments_from_state(const CMat& rho, const Dims& dims, const std::vector<std::size_t>& modes) {
    std::size_t m = modes.size();
    std::vector<SpMat> ops;
    for (auto k : modes) ops.push_back(embed(annihilation(dims[k]), k, dims));
    ModeMoments mm{CVec(m), CMat(m, m), CMat(m, m)};
    auto ev = [&](const SpMat& A) { return (A * rho).trace(); };
    for (std::size_t k = 0; k < m; ++k) {
        mm.alpha[k] = ev(ops[k]);
        for (std::size_t l = 0; l < m; ++l) {
            mm.N(k, l) = ev(SpMat(adjoint(ops[k]) * ops[l]));
            mm.M(k, l) = ev(SpMat(ops[k] * ops[l]));
        }
    }
    return mm;
}

struct CovarianceMatrix {
    RMat sigma;
    RVec mean;
};

// Quadratures d = (x+x^dag, i(x^dag - x))/sqrt2 per mode; vacuum variance 1/2.
// Nc, Mc are central moments <dx_k^dag dx_l>, <dx_k dx_l>.
inline CovarianceMatrix covariance_from_central(const CVec& alpha, const CMat& Nc, const CMat& Mc) {
    long m = alpha.size();
    CMat S(2 * m, 2 * m);  // symmetrized covariance of (x_1, x_1^dag, x_2, ...)
    for (long k = 0; k < m; ++k)
        for (long l = 0; l < m; ++l) {
            double dkl = k == l ? 0.5 : 0.0;
            S(2 * k, 2 * l) = 0.5 * (Mc(k, l) + Mc(l, k));
            S(2 * k, 2 * l + 1) = Nc(l, k) + dkl;
            S(2 * k + 1, 2 * l) = Nc(k, l) + dkl;
            S(2 * k + 1, 2 * l + 1) = std::conj(0.5 * (Mc(k, l) + Mc(l, k)));
        }
    CMat T = CMat::Zero(2 * m, 2 * m);
    const double r = 1.0 / std::sqrt(2.0);
    const cplx I(0, 1);
    CVec x(2 * m);
    for (long k = 0; k < m; ++k) {
        T(2 * k, 2 * k) = r;
        T(2 * k, 2 * k + 1) = r;
        T(2 * k + 1, 2 * k) = -I * r;
        T(2 * k + 1, 2 * k + 1) = I * r;
        x[2 * k] = alpha[k];
        x[2 * k + 1] = std::conj(alpha[k]);
    }
    CMat sig = T * S * T.transpose();
    CovarianceMatrix c;
    c.sigma = sig.real();
    c.sigma = 0.5 * (c.sigma + c.sigma.transpose()).eval();
    c.mean = (T * x).real();
    return c;
}

inline CovarianceMatrix covariance_from_moments(const ModeMoments& mm) {
    return covariance_from_central(mm.alpha, mm.N - mm.alpha.conjugate() * mm.alpha.transpose(),
                                   mm.M - mm.alpha * mm.alpha.transpose());
}

inline RMat symplectic_form(long modes) {
    RMat W = RMat::Zero(2 * modes, 2 * modes);
    for (long k = 0; k < modes; ++k) {
        W(2 * k, 2 * k + 1) = 1.0;
        W(2 * k + 1, 2 * k) = -1.0;
    }
    return W;
}

inline RVec symplectic_eigenvalues(const RMat& sigma) {
    long m = sigma.rows() / 2;
    CMat A = cplx(0, 1) * symplectic_form(m).cast<cplx>() * sigma.cast<cplx>();
    Eigen::ComplexEigenSolver<CMat> es(A, false);
    std::vector<double> ev;
    for (long i = 0; i < A.rows(); ++i) ev.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(ev.begin(), ev.end());
    RVec out(m);
    for (long k = 0; k < m; ++k) out[k] = 0.5 * (ev[2 * k] + ev[2 * k + 1]);
    return out;
}

inline bool is_physical(const CovarianceMatrix& c, double tol = 1e-6) {
    return symplectic_eigenvalues(c.sigma).minCoeff() >= 0.5 - tol;
}

inline double log_negativity(const CovarianceMatrix& c, double log_base = std::exp(1.0)) {
    if (c.sigma.rows() != 4) throw std::invalid_argument("log negativity needs a two-mode covariance matrix");
    RMat P = RMat::Identity(4, 4);
    P(3, 3) = -1.0;
    RMat pt = P * c.sigma * P;
    double nu = symplectic_eigenvalues(pt).minCoeff();
    return std::max(0.0, -std::log(nu / 0.5) / std::log(log_base));
}

}  // namespace phog
