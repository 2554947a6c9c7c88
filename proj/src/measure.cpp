#include "rw/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <cstring>
#include <random>
#include <stdexcept>

namespace rw {

void AmbientParams::validate() const {
    if (d != 2 && d != 3) throw std::invalid_argument("d must be 2 or 3");
    if (!(s > d - 1 && s < d) || !std::isfinite(s))
        throw std::invalid_argument("s must lie strictly between d-1 and d");
}

double dist2(const Point& a, const Point& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

bool finite_point(const Point& p) {
    return std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]);
}

AtomicMeasure::AtomicMeasure(AmbientParams amb, std::vector<Atom> atoms)
    : amb_(amb), atoms_(std::move(atoms)) {
    amb_.validate();
    for (const Atom& a : atoms_) {
        if (!finite_point(a.pos)) throw std::invalid_argument("non-finite atom position");
        if (!(a.w > 0.0) || !std::isfinite(a.w))
            throw std::invalid_argument("atom weights must be positive and finite");
        if (amb_.d == 2 && a.pos[2] != 0.0)
            throw std::invalid_argument("z coordinate must be 0 when d == 2");
    }
    total_mass_ = 0.0;
    weights_.reserve(atoms_.size());
    px_.reserve(atoms_.size());
    py_.reserve(atoms_.size());
    pz_.reserve(atoms_.size());
    for (const Atom& a : atoms_) {
        total_mass_ += a.w;
        weights_.push_back(a.w);
        px_.push_back(a.pos[0]);
        py_.push_back(a.pos[1]);
        pz_.push_back(a.pos[2]);
    }
    build_tree();
}

void AtomicMeasure::build_tree() {
    perm_.resize(atoms_.size());
    std::iota(perm_.begin(), perm_.end(), 0u);
    nodes_.clear();
    nodes_.reserve(atoms_.empty() ? 1 : 2 * atoms_.size());
    if (!atoms_.empty()) root_ = build_node(0, static_cast<std::uint32_t>(atoms_.size()));
}

std::int32_t AtomicMeasure::build_node(std::uint32_t begin, std::uint32_t end) {
    Node n;
    n.begin = begin;
    n.end = end;
    constexpr double inf = std::numeric_limits<double>::infinity();
    n.lo = {inf, inf, inf};
    n.hi = {-inf, -inf, -inf};
    for (std::uint32_t i = begin; i < end; ++i) {
        const Point& p = atoms_[perm_[i]].pos;
        for (int c = 0; c < 3; ++c) {
            n.lo[c] = std::min(n.lo[c], p[c]);
            n.hi[c] = std::max(n.hi[c], p[c]);
        }
        n.weight += atoms_[perm_[i]].w;
    }
    constexpr std::uint32_t leaf_size = 16;
    if (end - begin > leaf_size) {
        int axis = 0;
        double best = -1.0;
        for (int c = 0; c < 3; ++c) {
            double ext = n.hi[c] - n.lo[c];
            if (ext > best) { best = ext; axis = c; }
        }
        std::uint32_t mid = (begin + end) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             return atoms_[a].pos[axis] < atoms_[b].pos[axis];
                         });
        std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(n);
        std::int32_t l = build_node(begin, mid);
        std::int32_t r = build_node(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size()) - 1;
}

namespace {

// squared distance from x to the box [lo,hi]
double box_dist2(const Point& x, const Point& lo, const Point& hi) {
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        double t = std::max({lo[c] - x[c], 0.0, x[c] - hi[c]});
        d2 += t * t;
    }
    return d2;
}

// squared distance from x to the farthest point of the box
double box_far_dist2(const Point& x, const Point& lo, const Point& hi) {
    double d2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        double t = std::max(std::abs(x[c] - lo[c]), std::abs(x[c] - hi[c]));
        d2 += t * t;
    }
    return d2;
}

void check_ball_args(const Point& x, double r) {
    if (!finite_point(x)) throw std::invalid_argument("non-finite query point");
    if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
}

// stable LSD radix sort of (22-bit key << 32 | 32-bit payload) words, two
// 11-bit passes over the key; ties keep payload (generation) order
void radix_sort_packed(std::vector<std::uint64_t>& packed, std::vector<std::uint64_t>& buf) {
    const std::size_t n = packed.size();
    buf.resize(n);
    std::uint32_t hist[2048];
    for (int shift : {32, 43}) {
        std::fill(std::begin(hist), std::end(hist), 0u);
        for (std::size_t i = 0; i < n; ++i) ++hist[(packed[i] >> shift) & 0x7ff];
        std::uint32_t sum = 0;
        for (std::size_t b = 0; b < 2048; ++b) {
            std::uint32_t c = hist[b];
            hist[b] = sum;
            sum += c;
        }
        for (std::size_t i = 0; i < n; ++i)
            buf[hist[(packed[i] >> shift) & 0x7ff]++] = packed[i];
        packed.swap(buf);
    }
}

}  // namespace

std::vector<std::size_t> AtomicMeasure::ball_indices(const Point& x, double r) const {
    check_ball_args(x, r);
    std::vector<std::size_t> out;
    if (atoms_.empty()) return out;
    const double r2 = r * r;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (box_dist2(x, n.lo, n.hi) >= r2) continue;
        if (box_far_dist2(x, n.lo, n.hi) < r2) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) out.push_back(perm_[i]);
            continue;
        }
        if (n.left >= 0) {
            stack.push_back(n.left);
            stack.push_back(n.right);
        } else {
            for (std::uint32_t i = n.begin; i < n.end; ++i)
                if (dist2(atoms_[perm_[i]].pos, x) < r2) out.push_back(perm_[i]);
        }
    }
    if (out.size() > 4096) {
        // mark-and-sweep over a bitset yields ascending index order in
        // O(n/64 + k), cheaper than sorting large result sets
        thread_local std::vector<std::uint64_t> marks;
        const std::size_t words = (atoms_.size() + 63) / 64;
        marks.assign(words, 0);
        for (std::size_t i : out) marks[i >> 6] |= std::uint64_t{1} << (i & 63);
        std::size_t pos = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t m = marks[w];
            while (m) {
                out[pos++] = (w << 6) + static_cast<std::size_t>(std::countr_zero(m));
                m &= m - 1;
            }
        }
    } else {
        std::sort(out.begin(), out.end());
    }
    return out;
}

double AtomicMeasure::ball_mass(const Point& x, double r) const {
    check_ball_args(x, r);
    // a ball containing every atom sums to the cached total, which was
    // accumulated in the same ascending atom-index order
    if (!atoms_.empty() && box_far_dist2(x, nodes_[root_].lo, nodes_[root_].hi) < r * r)
        return total_mass_;
    // summed in ascending atom-index order to match the linear scan bit-for-bit
    double m = 0.0;
    for (std::size_t i : ball_indices(x, r)) m += atoms_[i].w;
    return m;
}

double AtomicMeasure::ball_mass_scan(const Point& x, double r) const {
    check_ball_args(x, r);
    const double r2 = r * r;
    double m = 0.0;
    for (const Atom& a : atoms_)
        if (dist2(a.pos, x) < r2) m += a.w;
    return m;
}

double AtomicMeasure::nearest_atom_dist(const Point& x) const {
    if (atoms_.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (box_dist2(x, n.lo, n.hi) >= best) continue;
        if (n.left >= 0) {
            // visit the nearer child first
            double dl = box_dist2(x, nodes_[n.left].lo, nodes_[n.left].hi);
            double dr = box_dist2(x, nodes_[n.right].lo, nodes_[n.right].hi);
            if (dl < dr) {
                stack.push_back(n.right);
                stack.push_back(n.left);
            } else {
                stack.push_back(n.left);
                stack.push_back(n.right);
            }
        } else {
            for (std::uint32_t i = n.begin; i < n.end; ++i)
                best = std::min(best, dist2(atoms_[perm_[i]].pos, x));
        }
    }
    return std::sqrt(best);
}

AtomicMeasure::DistanceProfile AtomicMeasure::distance_profile(const Point& x) const {
    DistanceProfile p;
    distance_profile(x, p);
    return p;
}

void AtomicMeasure::distance_profile(const Point& x, DistanceProfile& p) const {
    distance_profile_capped(x, std::numeric_limits<double>::infinity(), p);
}

namespace {

// 16-bit key prefix of the squared distance (sign is 0, so exponent plus four
// mantissa bits); the key order matches the numeric order
std::uint32_t d2_key(double d2) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(double));
    std::memcpy(&bits, &d2, sizeof(bits));
    return static_cast<std::uint32_t>(bits >> 48);
}

// smallest key K with mass({i : key(d2[i]) <= K}) >= cap, via a weighted
// histogram over the key space; the slight overshoot from key granularity
// only grows the set that gets sorted
std::uint32_t mass_select_key(const std::vector<double>& d2v,
                              const std::vector<double>& w, double cap) {
    thread_local std::vector<double> hist(1u << 16, 0.0);
    std::uint32_t kmin = (1u << 16) - 1, kmax = 0;
    for (std::size_t i = 0; i < d2v.size(); ++i) {
        std::uint32_t k = d2_key(d2v[i]);
        hist[k] += w[i];
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    double cum = 0.0;
    std::uint32_t key = kmax;
    for (std::uint32_t k = kmin; k <= kmax; ++k) {
        cum += hist[k];
        if (cum >= cap) { key = k; break; }
    }
    std::fill(hist.begin() + kmin, hist.begin() + kmax + 1, 0.0);
    return key;
}

}  // namespace

bool AtomicMeasure::distance_profile_capped(const Point& x, double mass_cap,
                                            DistanceProfile& p) const {
    if (!finite_point(x)) throw std::invalid_argument("non-finite query point");
    const std::size_t n = atoms_.size();
    p.dist.clear();
    p.mass.clear();
    if (n == 0) return false;
    // sort by squared distance (monotone in distance); non-negative doubles
    // have order-preserving bit patterns, so the top 22 bits serve as a radix
    // key, with truncated-key collisions repaired in a fixup pass
    thread_local std::vector<double> d2v, dflat;
    thread_local std::vector<std::uint64_t> packed, pbuf;
    thread_local std::vector<std::uint32_t> idx;
    d2v.resize(n);
    if (amb_.d == 2 && x[2] == 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            double ax = px_[i] - x[0], ay = py_[i] - x[1];
            d2v[i] = ax * ax + ay * ay;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double ax = px_[i] - x[0], ay = py_[i] - x[1], az = pz_[i] - x[2];
            d2v[i] = ax * ax + ay * ay + az * az;
        }
    }
    packed.clear();
    if (mass_cap < total_mass_) {
        // only distances up to the cap's cumulative-mass threshold are needed;
        // everything beyond it stays unsorted
        const std::uint32_t keycap = mass_select_key(d2v, weights_, mass_cap);
        for (std::size_t i = 0; i < n; ++i) {
            if (d2_key(d2v[i]) > keycap) continue;
            std::uint64_t bits;
            std::memcpy(&bits, &d2v[i], sizeof(bits));
            packed.push_back(((bits >> 42) << 32) | i);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t bits;
            static_assert(sizeof(double) == sizeof(bits));
            std::memcpy(&bits, &d2v[i], sizeof(bits));
            packed.push_back(((bits >> 42) << 32) | i);
        }
    }
    const std::size_t m = packed.size();
    radix_sort_packed(packed, pbuf);
    // flatten the sorted squared distances so the fixup and the cumulative
    // walk run over sequential memory
    dflat.resize(m);
    idx.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        idx[i] = static_cast<std::uint32_t>(packed[i]);
        dflat[i] = d2v[idx[i]];
    }
    // order runs of equal truncated keys by full squared distance; stable, so
    // equal distances keep ascending atom index
    for (std::size_t i = 0; i < m;) {
        const std::uint64_t hi = packed[i] >> 32;
        std::size_t j = i + 1;
        while (j < m && (packed[j] >> 32) == hi) ++j;
        for (std::size_t k = i + 1; k < j; ++k) {  // stable insertion sort
            std::uint32_t v = idx[k];
            double dv = dflat[k];
            std::size_t m = k;
            for (; m > i && dflat[m - 1] > dv; --m) {
                dflat[m] = dflat[m - 1];
                idx[m] = idx[m - 1];
            }
            dflat[m] = dv;
            idx[m] = v;
        }
        i = j;
    }
    double cum = 0.0;
    std::size_t grp_start = 0;
    double cum_before = 0.0;
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i + 1;
        const double q = dflat[i];
        while (j < m && dflat[j] == q) ++j;
        double r = std::sqrt(q);
        if (!p.dist.empty() && p.dist.back() == r) {
            // distinct squared distances rounding to one distance: re-sum the
            // merged tie group in ascending atom-index order
            std::sort(idx.begin() + grp_start, idx.begin() + j);
            cum = cum_before;
            for (std::size_t k = grp_start; k < j; ++k) cum += weights_[idx[k]];
            p.mass.back() = cum;
        } else {
            grp_start = i;
            cum_before = cum;
            for (std::size_t k = i; k < j; ++k) cum += weights_[idx[k]];
            p.dist.push_back(r);
            p.mass.push_back(cum);
        }
        if (cum >= mass_cap) return true;
        i = j;
    }
    return false;
}

AtomicMeasure build_cantor_measure(int d, double s, int depth,
                                   std::optional<double> ratio,
                                   std::optional<std::uint64_t> jitter_seed) {
    AmbientParams amb{d, s};
    amb.validate();
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    double ell = ratio ? *ratio : std::pow(2.0, -static_cast<double>(d) / s);
    if (!(ell > 0.0 && ell < 0.5)) throw std::invalid_argument("ratio must lie in (0, 1/2)");

    const std::size_t count = std::size_t{1} << (d * depth);
    const double w = 1.0 / static_cast<double>(count);
    const double side = std::pow(ell, depth);  // cell side at this depth
    std::mt19937_64 rng(jitter_seed ? *jitter_seed : 0);
    std::uniform_real_distribution<double> jit(-0.01 * side, 0.01 * side);

    std::vector<Atom> atoms(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        Point p{0.5, 0.5, d == 3 ? 0.5 : 0.0};
        // digits of idx in base 2^d pick the corner at each level
        std::size_t rem = idx;
        double cell = 1.0;
        Point corner{0.0, 0.0, 0.0};
        for (int lvl = 0; lvl < depth; ++lvl) {
            std::size_t digit = rem % (std::size_t{1} << d);
            rem /= (std::size_t{1} << d);
            for (int c = 0; c < d; ++c)
                if (digit & (std::size_t{1} << c)) corner[c] += cell * (1.0 - ell);
            cell *= ell;
        }
        for (int c = 0; c < d; ++c) p[c] = corner[c] + cell / 2.0;
        if (d == 2) p[2] = 0.0;
        if (jitter_seed)
            for (int c = 0; c < d; ++c) p[c] += jit(rng);
        atoms[idx] = Atom{p, w};
    }
    return AtomicMeasure(amb, std::move(atoms));
}

AtomicMeasure rescale_measure(const AtomicMeasure& mu, double lambda, const Point& z) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be positive");
    const double wf = std::pow(lambda, mu.s());
    std::vector<Atom> atoms = mu.atoms();
    for (Atom& a : atoms) {
        for (int c = 0; c < 3; ++c) a.pos[c] = lambda * a.pos[c] + z[c];
        if (mu.d() == 2) a.pos[2] = 0.0;
        a.w *= wf;
    }
    return AtomicMeasure(mu.ambient(), std::move(atoms));
}

GrowthReport growth_probe(const AtomicMeasure& mu, int sample_count, std::uint64_t rng_seed) {
    if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    GrowthReport rep;
    if (mu.size() == 0) return rep;
    const double s = mu.s();

    // radius grid: log-spaced between the finest interatomic scale and the diameter
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    const Point& p0 = mu.atom(0).pos;
    for (std::size_t i = 0; i < mu.size(); ++i)
        rmax = std::max(rmax, dist(mu.atom(i).pos, p0));
    rmax = std::max(2.0 * rmax, 1.0);
    for (std::size_t i = 0; i < std::min<std::size_t>(mu.size(), 512); ++i) {
        Point q = mu.atom(i).pos;
        q[0] += 1e-300;  // self-distance is 0; probe the nearest distinct atom
        double dn = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (j == i) continue;
            dn = std::min(dn, dist(mu.atom(j).pos, mu.atom(i).pos));
        }
        if (std::isfinite(dn) && dn > 0) rmin = std::min(rmin, dn);
    }
    if (!std::isfinite(rmin)) rmin = rmax / 2;

    const int grid = 24;
    auto probe = [&](const Point& x, double r) {
        double q = mu.ball_mass(x, r) / std::pow(r, s);
        rep.c1_empirical = std::max(rep.c1_empirical, q);
        ++rep.probe_count;
    };
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (int g = 0; g <= grid; ++g) {
            double r = rmin * std::pow(rmax / rmin, static_cast<double>(g) / grid);
            probe(mu.atom(i).pos, 1.0000000001 * r);
        }
    std::mt19937_64 rng(rng_seed);
    std::uniform_int_distribution<std::size_t> pick(0, mu.size() - 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < sample_count; ++k) {
        Point x = mu.atom(pick(rng)).pos;
        double r = rmin * std::pow(rmax / rmin, uni(rng));
        for (int c = 0; c < mu.d(); ++c) x[c] += (uni(rng) - 0.5) * r;
        if (mu.d() == 2) x[2] = 0.0;
        probe(x, r);
    }
    return rep;
}

}  // namespace rw
