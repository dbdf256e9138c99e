#include "clusterlab/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "clusterlab/error.hpp"
#include "clusterlab/simd/kernels.hpp"

namespace clab::neighbors {

namespace {

// Slack on triangle-inequality pruning so rounding in computed distances can
// never drop an exact answer.
constexpr double kPruneSlack = 1e-10;

struct Candidate {
    double dist;
    std::size_t index;
    bool operator<(const Candidate& o) const {
        return dist != o.dist ? dist < o.dist : index < o.index;
    }
};

}  // namespace

NeighborIndex::NeighborIndex(const DataMatrix& x, std::size_t leaf_size)
    : leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    validate_data(x, "build_index");
    std::vector<std::size_t> perm(x.rows());
    std::iota(perm.begin(), perm.end(), 0);
    nodes_.reserve(2 * x.rows() / leaf_size_ + 2);
    build(0, x.rows(), perm, x);
    points_ = x.select_rows(perm);
    order_ = std::move(perm);
}

std::size_t NeighborIndex::build(std::size_t begin, std::size_t end, std::vector<std::size_t>& perm,
                                 const DataMatrix& x) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    const auto& k = simd::active();
    const std::size_t d = x.cols();
    // Vantage point: the member farthest from the first member.
    const double* first = x.row(perm[begin]).data();
    std::size_t best = begin;
    double best_d = -1.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double dd = k.sq_l2(first, x.row(perm[i]).data(), d);
        if (dd > best_d || (dd == best_d && perm[i] < perm[best])) {
            best_d = dd;
            best = i;
        }
    }
    std::swap(perm[begin], perm[best]);
    const double* vp = x.row(perm[begin]).data();

    std::vector<Candidate> rest;
    rest.reserve(end - begin - 1);
    for (std::size_t i = begin + 1; i < end; ++i)
        rest.push_back({std::sqrt(k.sq_l2(vp, x.row(perm[i]).data(), d)), perm[i]});
    const std::size_t half = (rest.size() - 1) / 2;
    std::nth_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(half), rest.end());
    for (std::size_t i = 0; i < rest.size(); ++i) perm[begin + 1 + i] = rest[i].index;

    const std::size_t mid = begin + 1 + half + 1;  // inside = [begin+1, mid)
    auto bounds = [&](std::size_t from, std::size_t to) {
        double lo = INFINITY, hi = 0.0;
        for (std::size_t i = from; i < to; ++i) {
            lo = std::min(lo, rest[i].dist);
            hi = std::max(hi, rest[i].dist);
        }
        return std::pair{lo, hi};
    };
    const auto [in_lo, in_hi] = bounds(0, half + 1);
    const auto [out_lo, out_hi] = bounds(half + 1, rest.size());

    const std::size_t inside = build(begin + 1, mid, perm, x);
    std::size_t outside = 0;
    const bool has_outside = mid < end;
    if (has_outside) outside = build(mid, end, perm, x);

    Node& node = nodes_[id];
    node.leaf = false;
    node.inside = inside;
    node.outside = has_outside ? outside : 0;
    node.inside_lo = in_lo;
    node.inside_hi = in_hi;
    node.outside_lo = has_outside ? out_lo : INFINITY;
    node.outside_hi = has_outside ? out_hi : 0.0;
    return id;
}

double NeighborIndex::distance_to(std::span<const double> q, std::size_t pos) const {
    return std::sqrt(simd::active().sq_l2(q.data(), points_.row(pos).data(), q.size()));
}

Neighbors NeighborIndex::knn(std::span<const double> query, std::size_t k) const {
    require(k >= 1 && k <= size(), "knn: k=" + std::to_string(k) + " outside [1, " + std::to_string(size()) + "]");
    require(query.size() == dim(), "knn: query dimension differs from the index");
    std::priority_queue<Candidate> heap;  // max-heap: worst on top
    auto offer = [&](double dist, std::size_t pos) {
        const Candidate c{dist, order_[pos]};
        if (heap.size() < k) {
            heap.push(c);
        } else if (c < heap.top()) {
            heap.pop();
            heap.push(c);
        }
    };
    auto tau = [&] { return heap.size() < k ? INFINITY : heap.top().dist; };

    struct Frame {
        std::size_t node;
        double lower_bound;
    };
    std::vector<Frame> stack{{0, 0.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.lower_bound > tau() * (1.0 + kPruneSlack)) continue;
        const Node& node = nodes_[f.node];
        if (node.leaf) {
            for (std::size_t p = node.begin; p < node.end; ++p) offer(distance_to(query, p), p);
            continue;
        }
        const double dq = distance_to(query, node.begin);
        offer(dq, node.begin);
        const double lb_in = std::max({dq - node.inside_hi, node.inside_lo - dq, 0.0});
        const double lb_out = node.outside_lo == INFINITY
                                  ? INFINITY
                                  : std::max({dq - node.outside_hi, node.outside_lo - dq, 0.0});
        // Push the farther child first so the nearer one is explored first.
        if (lb_in <= lb_out) {
            if (lb_out != INFINITY) stack.push_back({node.outside, lb_out});
            stack.push_back({node.inside, lb_in});
        } else {
            stack.push_back({node.inside, lb_in});
            stack.push_back({node.outside, lb_out});
        }
    }
    Neighbors out;
    out.indices.resize(heap.size());
    out.distances.resize(heap.size());
    for (std::size_t i = heap.size(); i-- > 0;) {
        out.indices[i] = heap.top().index;
        out.distances[i] = heap.top().dist;
        heap.pop();
    }
    return out;
}

Neighbors NeighborIndex::knn_excluding(std::span<const double> query, std::size_t k, std::size_t self) const {
    require(k >= 1 && k < size(), "knn: k=" + std::to_string(k) + " must be in [1, n-1] when excluding self");
    Neighbors nb = knn(query, k + 1);
    auto it = std::find(nb.indices.begin(), nb.indices.end(), self);
    const auto pos = it == nb.indices.end() ? nb.indices.size() - 1
                                            : static_cast<std::size_t>(it - nb.indices.begin());
    nb.indices.erase(nb.indices.begin() + static_cast<std::ptrdiff_t>(pos));
    nb.distances.erase(nb.distances.begin() + static_cast<std::ptrdiff_t>(pos));
    return nb;
}

std::vector<std::size_t> NeighborIndex::radius(std::span<const double> query, double eps) const {
    require(eps >= 0.0, "radius: eps must be non-negative");
    require(query.size() == dim(), "radius: query dimension differs from the index");
    std::vector<std::size_t> out;
    const double limit = eps * (1.0 + kPruneSlack);
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (node.leaf) {
            for (std::size_t p = node.begin; p < node.end; ++p)
                if (distance_to(query, p) <= eps) out.push_back(order_[p]);
            continue;
        }
        const double dq = distance_to(query, node.begin);
        if (dq <= eps) out.push_back(order_[node.begin]);
        if (std::max(dq - node.inside_hi, node.inside_lo - dq) <= limit) stack.push_back(node.inside);
        if (node.outside_lo != INFINITY && std::max(dq - node.outside_hi, node.outside_lo - dq) <= limit)
            stack.push_back(node.outside);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {
constexpr std::size_t kBatchSize = 16;
}

struct NeighborIndex::Batch {
    std::size_t k = 0;
    std::vector<const double*> queries;
    std::vector<std::vector<Candidate>> heaps;  // max-heaps on Candidate order
    // Stack of (query slot, lower bound) lists, one segment per open node.
    std::vector<std::pair<std::size_t, double>> active;

    double tau(std::size_t j) const { return heaps[j].size() < k ? INFINITY : heaps[j].front().dist; }
    void offer(std::size_t j, const Candidate& c) {
        auto& h = heaps[j];
        if (h.size() < k) {
            h.push_back(c);
            std::push_heap(h.begin(), h.end());
        } else if (c < h.front()) {
            std::pop_heap(h.begin(), h.end());
            h.back() = c;
            std::push_heap(h.begin(), h.end());
        }
    }
};

void NeighborIndex::search_batch(Batch& b, std::size_t node_id, std::size_t first, std::size_t last) const {
    const Node& node = nodes_[node_id];
    const std::size_t d = dim();
    const auto& kern = simd::active();
    if (node.leaf) {
        for (std::size_t a = first; a < last; ++a) {
            const auto [j, lb] = b.active[a];
            if (lb > b.tau(j) * (1.0 + kPruneSlack)) continue;
            for (std::size_t p = node.begin; p < node.end; ++p)
                b.offer(j, {std::sqrt(kern.sq_l2(b.queries[j], points_.row(p).data(), d)), order_[p]});
        }
        return;
    }
    // Per active query: lower bounds for both children.
    struct Bounds {
        std::size_t j;
        double in, out;
    };
    std::vector<Bounds> bounds;
    bounds.reserve(last - first);
    std::size_t inside_first_votes = 0;
    const bool has_outside = node.outside_lo != INFINITY;
    for (std::size_t a = first; a < last; ++a) {
        const auto [j, lb] = b.active[a];
        if (lb > b.tau(j) * (1.0 + kPruneSlack)) continue;
        const double dq = std::sqrt(kern.sq_l2(b.queries[j], points_.row(node.begin).data(), d));
        b.offer(j, {dq, order_[node.begin]});
        const double lb_in = std::max({dq - node.inside_hi, node.inside_lo - dq, 0.0});
        const double lb_out =
            has_outside ? std::max({dq - node.outside_hi, node.outside_lo - dq, 0.0}) : INFINITY;
        bounds.push_back({j, lb_in, lb_out});
        inside_first_votes += lb_in <= lb_out;
    }
    if (bounds.empty()) return;
    const bool inside_first = 2 * inside_first_votes >= bounds.size();
    for (int pass = 0; pass < 2; ++pass) {
        const bool inside = (pass == 0) == inside_first;
        if (!inside && !has_outside) continue;
        const std::size_t seg = b.active.size();
        for (const auto& bd : bounds) {
            const double lb = inside ? bd.in : bd.out;
            if (lb <= b.tau(bd.j) * (1.0 + kPruneSlack)) b.active.push_back({bd.j, lb});
        }
        if (b.active.size() > seg) search_batch(b, inside ? node.inside : node.outside, seg, b.active.size());
        b.active.resize(seg);
    }
}

std::vector<Neighbors> NeighborIndex::all_knn(std::size_t k) const {
    require(k >= 1 && k < size(), "all_knn: k=" + std::to_string(k) + " must be in [1, n-1]");
    std::vector<Neighbors> out(size());
    Batch b;
    b.k = k + 1;
    for (std::size_t start = 0; start < size(); start += kBatchSize) {
        const std::size_t stop = std::min(size(), start + kBatchSize);
        b.queries.clear();
        b.heaps.assign(stop - start, {});
        b.active.clear();
        for (std::size_t p = start; p < stop; ++p) {
            b.queries.push_back(points_.row(p).data());
            b.active.push_back({p - start, 0.0});
        }
        search_batch(b, 0, 0, b.active.size());
        for (std::size_t p = start; p < stop; ++p) {
            auto& h = b.heaps[p - start];
            std::sort_heap(h.begin(), h.end());
            const std::size_t self = order_[p];
            auto it = std::find_if(h.begin(), h.end(), [&](const Candidate& c) { return c.index == self; });
            h.erase(it == h.end() ? h.end() - 1 : it);
            Neighbors& nb = out[self];
            for (const auto& c : h) {
                nb.indices.push_back(c.index);
                nb.distances.push_back(c.dist);
            }
        }
    }
    return out;
}

NeighborIndex build_index(const DataMatrix& x) { return NeighborIndex(x); }

std::vector<Neighbors> knn_graph(const NeighborIndex& index, std::size_t k) { return index.all_knn(k); }

std::vector<double> k_distance_profile(const DataMatrix& x, std::size_t k) {
    require(k >= 1 && k < x.rows(), "k_distance_profile: k must be in [1, n-1]");
    const auto graph = NeighborIndex(x).all_knn(k);
    std::vector<double> profile(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) profile[i] = graph[i].distances.back();
    std::sort(profile.begin(), profile.end(), std::greater<>());
    return profile;
}

double estimate_eps(std::span<const double> profile) {
    require(profile.size() >= 3, "estimate_eps: profile needs at least 3 entries");
    const double top = *std::max_element(profile.begin(), profile.end());
    if (top <= 0.0) fail(ErrorKind::DegenerateInput, "estimate_eps: all k-distances are zero");

    // Perpendicular distance is proportional to the vertical gap to the chord.
    const std::size_t n = profile.size();
    const double first = profile.front();
    const double slope = (profile.back() - first) / static_cast<double>(n - 1);
    std::size_t knee = 0;
    double best = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double gap = std::abs(profile[i] - (first + slope * static_cast<double>(i)));
        if (gap > best) {
            best = gap;
            knee = i;
        }
    }
    double eps;
    if (best <= 1e-9 * top) {
        std::vector<double> sorted(profile.begin(), profile.end());
        std::sort(sorted.begin(), sorted.end());
        eps = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    } else {
        eps = profile[knee];
    }
    if (eps <= 0.0) {
        eps = top;
        for (double v : profile)
            if (v > 0.0) eps = std::min(eps, v);
    }
    return eps;
}

}  // namespace clab::neighbors
