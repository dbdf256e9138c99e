#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <queue>

#include "clusterlab/error.hpp"
#include "clusterlab/linalg.hpp"
#include "clusterlab/rng.hpp"
#include "clusterlab/simd/kernels.hpp"
#include "symmetric.hpp"

namespace clab::linalg {

namespace {

constexpr double kEps = DBL_EPSILON;

/// Reflector mapping x (length m) onto alpha * e_0.
struct PendingReflector {
    double alpha = 0.0;
    Tridiagonal::Reflector h;
};

PendingReflector make_reflector(const double* x, std::size_t m, const simd::KernelTable& k) {
    PendingReflector r;
    const double tail = m > 1 ? k.dot(x + 1, x + 1, m - 1) : 0.0;
    if (tail == 0.0) {
        r.alpha = x[0];
        return r;
    }
    const double norm = std::sqrt(x[0] * x[0] + tail);
    r.alpha = x[0] >= 0.0 ? -norm : norm;
    r.h.v.assign(x, x + m);
    r.h.v[0] = x[0] - r.alpha;
    r.h.tau = 2.0 / (r.h.v[0] * r.h.v[0] + tail);
    return r;
}

}  // namespace

void Tridiagonal::apply_q(std::span<double> x) const {
    const auto& k = simd::active();
    for (std::size_t i = reflectors.size(); i-- > 0;) {
        const Reflector& r = reflectors[i];
        if (r.tau == 0.0) continue;
        double* sub = x.data() + i + 1;
        const double s = r.tau * k.dot(r.v.data(), sub, r.v.size());
        k.axpy(-s, r.v.data(), sub, r.v.size());
    }
}

Tridiagonal tridiagonalize(const Matrix& input) {
    Matrix a = detail::checked_symmetric(input, "tridiagonalize");
    const std::size_t n = a.rows();
    const auto& k = simd::active();
    Tridiagonal t;
    t.diag.assign(n, 0.0);
    t.off.assign(n > 0 ? n - 1 : 0, 0.0);
    if (n == 0) return t;
    if (n >= 3) t.reflectors.resize(n - 2);

    std::vector<double> p(n), w(n);
    PendingReflector next;
    bool have_next = false;
    bool have_p = false;

    for (std::size_t step = 0; step + 2 < n; ++step) {
        const std::size_t m = n - step - 1;
        t.diag[step] = a(step, step);
        PendingReflector cur = have_next ? std::move(next) : make_reflector(&a(step, step + 1), m, k);
        have_next = false;
        t.off[step] = cur.alpha;
        if (cur.h.tau == 0.0) {
            have_p = false;
            t.reflectors[step] = std::move(cur.h);
            continue;
        }
        const std::vector<double>& v = cur.h.v;
        const double tau = cur.h.tau;
        const std::size_t base = step + 1;

        if (!have_p)
            for (std::size_t r = 0; r < m; ++r) p[r] = k.dot(&a(base + r, base), v.data(), m);
        for (std::size_t r = 0; r < m; ++r) p[r] *= tau;
        const double kk = 0.5 * tau * k.dot(v.data(), p.data(), m);
        for (std::size_t r = 0; r < m; ++r) w[r] = p[r] - kk * v[r];

        // Trailing update B -= v w^T + w v^T, one row at a time. The next
        // step's B v product is accumulated while each row is still hot.
        k.sub_rank2(v[0], w.data(), w[0], v.data(), &a(base, base), m);
        if (step + 3 < n) {
            next = make_reflector(&a(base, base + 1), m - 1, k);
            have_next = true;
            have_p = next.h.tau != 0.0;
            for (std::size_t r = 1; r < m; ++r) {
                double* row = &a(base + r, base);
                k.sub_rank2(v[r], w.data(), w[r], v.data(), row, m);
                if (have_p) p[r - 1] = k.dot(row + 1, next.h.v.data(), m - 1);
            }
        } else {
            for (std::size_t r = 1; r < m; ++r)
                k.sub_rank2(v[r], w.data(), w[r], v.data(), &a(base + r, base), m);
            have_p = false;
        }
        t.reflectors[step] = std::move(cur.h);
    }
    if (n >= 2) {
        t.diag[n - 2] = a(n - 2, n - 2);
        t.off[n - 2] = a(n - 2, n - 1);
    }
    t.diag[n - 1] = a(n - 1, n - 1);
    return t;
}

namespace {

/// Implicit-shift QL on (d, e). z holds eigenvectors as rows and is rotated
/// along with the iteration.
void tridiagonal_ql(std::vector<double>& d, std::vector<double> off, Matrix& z) {
    const std::size_t n = d.size();
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = off[i];

    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > kEps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 100)
                    fail(ErrorKind::NumericalFailure, "tridiagonal QL: no convergence");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    double* zi = z.row(i).data();
                    double* zi1 = z.row(i + 1).data();
                    for (std::size_t k = 0; k < z.cols(); ++k) {
                        const double hk = zi1[k];
                        zi1[k] = s * zi[k] + c * hk;
                        zi[k] = c * zi[k] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > kEps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace

SymEigResult tridiagonal_ql_eig(const Matrix& a) {
    const Tridiagonal t = tridiagonalize(a);
    const std::size_t n = t.diag.size();
    std::vector<double> d = t.diag;
    Matrix z = Matrix::identity(n);
    tridiagonal_ql(d, t.off, z);
    for (std::size_t i = 0; i < n; ++i) t.apply_q(z.row(i));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    SymEigResult out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        out.eigenvalues[i] = d[order[i]];
        const auto src = z.row(order[i]);
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, i) = src[r];
    }
    return out;
}

namespace {

/// One unreduced diagonal block [begin, end) of the tridiagonal matrix.
struct Block {
    std::size_t begin;
    std::size_t end;
    double lo;
    double hi;
    double norm;
    double pivmin;

    std::size_t size() const { return end - begin; }
};

std::vector<Block> split_blocks(const Tridiagonal& t) {
    const std::size_t n = t.diag.size();
    std::vector<Block> blocks;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool last = i + 1 == n;
        const bool split = last || std::abs(t.off[i]) <=
                                       kEps * (std::abs(t.diag[i]) + std::abs(t.diag[i + 1]));
        if (!split) continue;
        Block b{begin, i + 1, 0.0, 0.0, 0.0, 0.0};
        double lo = INFINITY, hi = -INFINITY, emax2 = 0.0;
        for (std::size_t j = b.begin; j < b.end; ++j) {
            const double left = j > b.begin ? std::abs(t.off[j - 1]) : 0.0;
            const double right = j + 1 < b.end ? std::abs(t.off[j]) : 0.0;
            lo = std::min(lo, t.diag[j] - left - right);
            hi = std::max(hi, t.diag[j] + left + right);
            if (j + 1 < b.end) emax2 = std::max(emax2, t.off[j] * t.off[j]);
        }
        b.norm = std::max(std::abs(lo), std::abs(hi));
        b.pivmin = DBL_MIN * std::max(1.0, emax2);
        const double margin = 2.0 * kEps * b.norm * static_cast<double>(b.size()) + 2.0 * b.pivmin;
        b.lo = lo - margin;
        b.hi = hi + margin;
        blocks.push_back(b);
        begin = i + 1;
    }
    return blocks;
}

/// Number of eigenvalues of the block strictly below x.
std::size_t sturm_count(const Tridiagonal& t, const Block& b, double x) {
    std::size_t count = 0;
    double q = t.diag[b.begin] - x;
    if (std::abs(q) < b.pivmin) q = -b.pivmin;
    if (q < 0) ++count;
    for (std::size_t j = b.begin + 1; j < b.end; ++j) {
        const double e = t.off[j - 1];
        q = t.diag[j] - x - e * e / q;
        if (std::abs(q) < b.pivmin) q = -b.pivmin;
        if (q < 0) ++count;
    }
    return count;
}

/// The rank-th smallest eigenvalue (0-based) of the block by bisection.
double bisect_eigenvalue(const Tridiagonal& t, const Block& b, std::size_t rank) {
    double lo = b.lo;
    double hi = b.hi;
    for (int iter = 0; iter < 256; ++iter) {
        const double tol = 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + b.pivmin;
        if (hi - lo <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, b, mid) > rank)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Solves (T_b - lambda I) x = rhs in place with partial pivoting.
class ShiftedSolver {
public:
    ShiftedSolver(const Tridiagonal& t, const Block& b, double lambda) : m_(b.size()) {
        d_.resize(m_);
        u1_.assign(m_, 0.0);
        u2_.assign(m_, 0.0);
        l_.assign(m_, 0.0);
        swap_.assign(m_, 0);
        const double tiny = std::max(kEps * b.norm, b.pivmin);
        for (std::size_t i = 0; i < m_; ++i) {
            d_[i] = t.diag[b.begin + i] - lambda;
            if (i + 1 < m_) u1_[i] = t.off[b.begin + i];
        }
        for (std::size_t i = 0; i + 1 < m_; ++i) {
            const double sub = t.off[b.begin + i];
            if (std::abs(d_[i]) >= std::abs(sub)) {
                if (d_[i] == 0.0) d_[i] = tiny;
                l_[i] = sub / d_[i];
                d_[i + 1] -= l_[i] * u1_[i];
            } else {
                swap_[i] = 1;
                l_[i] = d_[i] / sub;
                const double next_u1 = i + 2 < m_ ? u1_[i + 1] : 0.0;
                const double new_d1 = u1_[i] - l_[i] * d_[i + 1];
                const double new_u1 = -l_[i] * next_u1;
                u2_[i] = next_u1;
                u1_[i] = d_[i + 1];
                d_[i] = sub;
                d_[i + 1] = new_d1;
                if (i + 1 < m_) u1_[i + 1] = new_u1;
            }
        }
        for (double& v : d_)
            if (v == 0.0) v = tiny;
    }

    void solve(std::vector<double>& x) const {
        for (std::size_t i = 0; i + 1 < m_; ++i) {
            if (swap_[i]) std::swap(x[i], x[i + 1]);
            x[i + 1] -= l_[i] * x[i];
        }
        for (std::size_t i = m_; i-- > 0;) {
            double s = x[i];
            if (i + 1 < m_) s -= u1_[i] * x[i + 1];
            if (i + 2 < m_) s -= u2_[i] * x[i + 2];
            x[i] = s / d_[i];
        }
    }

private:
    std::size_t m_;
    std::vector<double> d_, u1_, u2_, l_;
    std::vector<char> swap_;
};

double normalize(std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    const double norm = std::sqrt(s);
    if (norm > 0.0)
        for (double& v : x) v /= norm;
    return norm;
}

struct Selected {
    std::size_t block;
    std::size_t rank;  ///< ascending rank inside the block
    double value;
};

}  // namespace

SymEigResult sym_eig_partial(const Matrix& a, std::size_t count, Spectrum which) {
    const std::size_t n = a.rows();
    require(a.rows() == a.cols(), "sym_eig_partial: matrix is not square");
    require(count >= 1 && count <= n, "sym_eig_partial: count out of range");
    const Tridiagonal t = tridiagonalize(a);
    const std::vector<Block> blocks = split_blocks(t);
    const bool largest = which == Spectrum::largest;

    // Merge the per-block spectra from the requested end, computing block
    // eigenvalues lazily.
    struct Head {
        double value;
        std::size_t block;
        std::size_t taken;
    };
    auto worse = [largest](const Head& x, const Head& y) {
        if (x.value != y.value) return largest ? x.value < y.value : x.value > y.value;
        return x.block > y.block;
    };
    auto rank_of = [&](std::size_t b, std::size_t taken) {
        return largest ? blocks[b].size() - 1 - taken : taken;
    };
    std::priority_queue<Head, std::vector<Head>, decltype(worse)> heads(worse);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        heads.push({bisect_eigenvalue(t, blocks[b], rank_of(b, 0)), b, 0});

    std::vector<std::vector<Selected>> per_block(blocks.size());
    for (std::size_t i = 0; i < count; ++i) {
        const Head h = heads.top();
        heads.pop();
        per_block[h.block].push_back({h.block, rank_of(h.block, h.taken), h.value});
        if (h.taken + 1 < blocks[h.block].size())
            heads.push({bisect_eigenvalue(t, blocks[h.block], rank_of(h.block, h.taken + 1)), h.block,
                        h.taken + 1});
    }

    struct Pair {
        double value;
        std::size_t block;
        std::size_t rank;
        std::vector<double> vec;
    };
    std::vector<Pair> pairs;
    pairs.reserve(count);

    for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto& sel = per_block[b];
        if (sel.empty()) continue;
        const Block& blk = blocks[b];
        const std::size_t m = blk.size();
        // Walk away from the requested end so that a pair never depends on how
        // many further pairs were asked for.
        std::sort(sel.begin(), sel.end(), [largest](const Selected& x, const Selected& y) {
            return largest ? x.rank > y.rank : x.rank < y.rank;
        });
        const double direction = largest ? -1.0 : 1.0;
        const double cluster_gap = 1e-3 * blk.norm;
        const double min_sep = 10.0 * kEps * blk.norm;

        std::vector<std::vector<double>> block_vecs;
        double shifted_prev = 0.0;
        std::size_t cluster_start = 0;
        for (std::size_t s = 0; s < sel.size(); ++s) {
            double shift = sel[s].value;
            if (s > 0) {
                if (std::abs(sel[s].value - sel[s - 1].value) > cluster_gap) cluster_start = s;
                if (direction * (shift - shifted_prev) < min_sep)
                    shift = shifted_prev + direction * min_sep;
            }
            shifted_prev = shift;

            std::vector<double> x(m);
            Rng rng(derive_seed(0x5EEDu + blk.begin, sel[s].rank));
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            normalize(x);

            const ShiftedSolver solver(t, blk, shift);
            for (int iter = 0; iter < 5; ++iter) {
                solver.solve(x);
                for (std::size_t c = cluster_start; c < s; ++c) {
                    const auto& u = block_vecs[c];
                    double proj = 0.0;
                    for (std::size_t j = 0; j < m; ++j) proj += u[j] * x[j];
                    for (std::size_t j = 0; j < m; ++j) x[j] -= proj * u[j];
                }
                if (normalize(x) == 0.0)
                    fail(ErrorKind::NumericalFailure, "sym_eig_partial: inverse iteration collapsed");
            }
            block_vecs.push_back(x);
        }
        for (std::size_t s = 0; s < sel.size(); ++s) {
            std::vector<double> full(n, 0.0);
            std::copy(block_vecs[s].begin(), block_vecs[s].end(), full.begin() + blk.begin);
            t.apply_q(full);
            pairs.push_back({sel[s].value, b, sel[s].rank, std::move(full)});
        }
    }

    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.value != y.value) return x.value < y.value;
        if (x.block != y.block) return x.block < y.block;
        return x.rank < y.rank;
    });
    SymEigResult out{std::vector<double>(count), Matrix(n, count)};
    for (std::size_t i = 0; i < count; ++i) {
        out.eigenvalues[i] = pairs[i].value;
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, i) = pairs[i].vec[r];
    }
    return out;
}

}  // namespace clab::linalg
