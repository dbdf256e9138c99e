#include <algorithm>
#include <cmath>
#include <string>

#include "clusterlab/dimred.hpp"
#include "clusterlab/error.hpp"
#include "clusterlab/rng.hpp"
#include "clusterlab/simd/kernels.hpp"

namespace clab::dimred {

namespace {

constexpr std::size_t kMaxRows = 10000;
constexpr std::size_t kBisectionSteps = 200;
constexpr double kEntropyTolerance = 1e-10;

/// Initial layout: leading principal components, or seeded normals when the
/// data has too few rows or columns for them.
Matrix initial_layout(const DataMatrix& x, std::size_t dim, std::uint64_t seed) {
    Matrix y;
    if (dim <= std::min(x.rows() - 1, x.cols())) y = pca(x, dim).coords;
    double mean = 0.0, var = 0.0;
    if (!y.empty()) {
        for (std::size_t i = 0; i < y.rows(); ++i) mean += y(i, 0);
        mean /= static_cast<double>(y.rows());
        for (std::size_t i = 0; i < y.rows(); ++i) var += (y(i, 0) - mean) * (y(i, 0) - mean);
        var /= static_cast<double>(y.rows());
    }
    if (y.empty() || var == 0.0) {
        Rng rng(seed);
        y = Matrix(x.rows(), dim);
        for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] = rng.normal();
        var = 1.0;
    }
    const double scale = 1e-4 / std::sqrt(var);
    for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] *= scale;
    return y;
}

}  // namespace

TsneAffinities tsne_affinities(const DataMatrix& x, double perplexity) {
    validate_data(x, "tsne");
    const std::size_t n = x.rows();
    require(n <= kMaxRows, "tsne: exact t-SNE is limited to " + std::to_string(kMaxRows) + " rows");
    require(perplexity > 0.0 && perplexity < static_cast<double>(n - 1) / 3.0,
            "tsne: perplexity must be in (0, (n-1)/3)");
    const auto& kern = simd::active();
    const double target = std::log(perplexity);

    TsneAffinities out;
    out.joint = Matrix(n, n);
    out.betas.resize(n);
    out.perplexity.resize(n);
    std::vector<double> d(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dmin = INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            d[j] = j == i ? 0.0 : kern.sq_l2(x.row(i).data(), x.row(j).data(), x.cols());
            if (j != i) dmin = std::min(dmin, d[j]);
        }
        // Entropy is unchanged by shifting distances; the shift avoids underflow.
        for (std::size_t j = 0; j < n; ++j) d[j] = j == i ? 0.0 : d[j] - dmin;

        double beta = 1.0, lo = 0.0, hi = INFINITY, entropy = 0.0, sum = 0.0;
        for (std::size_t step = 0; step < kBisectionSteps; ++step) {
            sum = 0.0;
            double weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = j == i ? 0.0 : std::exp(-d[j] * beta);
                sum += p[j];
                weighted += d[j] * p[j];
            }
            entropy = std::log(sum) + beta * weighted / sum;
            if (std::abs(entropy - target) < kEntropyTolerance) break;
            if (entropy > target) {
                lo = beta;
                beta = hi == INFINITY ? beta * 2.0 : 0.5 * (beta + hi);
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
        }
        out.betas[i] = beta;
        out.perplexity[i] = std::exp(entropy);
        for (std::size_t j = 0; j < n; ++j) out.joint(i, j) = p[j] / sum;
    }
    const double norm = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (out.joint(i, j) + out.joint(j, i)) * norm;
            out.joint(i, j) = v;
            out.joint(j, i) = v;
        }
    return out;
}

Embedding tsne(const DataMatrix& x, std::size_t target_dim, const TsneParams& params, std::uint64_t seed) {
    require(target_dim >= 1, "tsne: target_dim must be at least 1");
    const auto aff = tsne_affinities(x, params.perplexity);
    const Matrix& p = aff.joint;
    const std::size_t n = x.rows(), dim = target_dim;

    Matrix y = initial_layout(x, dim, seed);
    Matrix update(n, dim), gains(n, dim, 1.0), grad(n, dim);
    std::vector<double> diff(dim);
    Embedding e;
    e.method = "tsne";
    e.nonstandard = dim > 3;

    for (std::size_t it = 0; it < params.iterations; ++it) {
        const double exag = it < params.exaggeration_iterations ? params.exaggeration : 1.0;
        const double momentum =
            it < params.exaggeration_iterations ? params.initial_momentum : params.final_momentum;
        const bool record = (it + 1) % 50 == 0 || it + 100 >= params.iterations;

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < dim; ++c) s += (y(i, c) - y(j, c)) * (y(i, c) - y(j, c));
                z += 2.0 / (1.0 + s);
            }

        std::fill(grad.data(), grad.data() + grad.size(), 0.0);
        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    diff[c] = y(i, c) - y(j, c);
                    s += diff[c] * diff[c];
                }
                const double num = 1.0 / (1.0 + s);
                const double pij = p(i, j);
                if (record && pij > 0.0) kl += 2.0 * pij * std::log(pij * z / num);
                const double coef = 4.0 * (exag * pij - num / z) * num;
                for (std::size_t c = 0; c < dim; ++c) {
                    grad(i, c) += coef * diff[c];
                    grad(j, c) -= coef * diff[c];
                }
            }
        if (record) e.kl_history.emplace_back(it, kl);

        for (std::size_t k = 0; k < y.size(); ++k) {
            double& g = gains.data()[k];
            double& u = update.data()[k];
            const double gr = grad.data()[k];
            g = (u * gr < 0.0) ? g + 0.2 : g * 0.8;
            g = std::max(g, 0.01);
            u = momentum * u - params.learning_rate * g * gr;
            y.data()[k] += u;
        }
        for (std::size_t c = 0; c < dim; ++c) {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m += y(i, c);
            m /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, c) -= m;
        }
    }
    if (!y.all_finite()) fail(ErrorKind::NumericalFailure, "tsne: layout diverged");
    e.coords = std::move(y);
    return e;
}

}  // namespace clab::dimred
