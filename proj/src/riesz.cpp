#include "rw/riesz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rw/errors.hpp"

namespace rw {

void TruncationSpec::validate() const {
    if (!(inner_radius >= 0.0)) throw std::invalid_argument("inner_radius must be >= 0");
    if (!(inner_radius < outer_radius))
        throw std::invalid_argument("inner_radius must be < outer_radius");
}

namespace {

// w * (a-x)/|a-x|^{1+s}
inline void add_kernel_term(Point& acc, const Point& a, const Point& x, double w, double s) {
    double dx = a[0] - x[0], dy = a[1] - x[1], dz = a[2] - x[2];
    double r2 = dx * dx + dy * dy + dz * dz;
    double r = std::sqrt(r2);
    double f = w / std::pow(r, 1.0 + s);
    acc[0] += f * dx;
    acc[1] += f * dy;
    acc[2] += f * dz;
}

}  // namespace

KernelEval riesz_at(const AtomicMeasure& mu, const Point& x, TruncationSpec trunc) {
    trunc.validate();
    if (!finite_point(x)) throw std::invalid_argument("non-finite evaluation point");
    const double s = mu.s();
    KernelEval out;
    for (const Atom& a : mu.atoms()) {
        double r = dist(a.pos, x);
        if (r == 0.0 && trunc.inner_radius == 0.0)
            throw SingularityError("riesz_at: evaluation point coincides with an atom");
        if (r <= trunc.inner_radius || r >= trunc.outer_radius) continue;
        add_kernel_term(out.value, a.pos, x, a.w, s);
        ++out.terms_used;
    }
    return out;
}

double riesz_maximal(const AtomicMeasure& mu, const Point& x,
                     const std::vector<BallSpec>& ball_family) {
    if (ball_family.empty()) throw std::invalid_argument("riesz_maximal: empty ball family");
    const double s = mu.s();
    double best = 0.0;
    for (const BallSpec& B : ball_family) {
        if (!(dist(B.center, x) < B.radius))
            throw std::invalid_argument("riesz_maximal: a family ball does not contain x");
        Point acc{0.0, 0.0, 0.0};
        for (const Atom& a : mu.atoms()) {
            if (dist(a.pos, B.center) < 2.0 * B.radius) continue;  // inside 2B
            add_kernel_term(acc, a.pos, x, a.w, s);
        }
        double mag = std::sqrt(acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]);
        best = std::max(best, mag);
    }
    return best;
}

std::vector<BallSpec> default_ball_family(const Point& x, int d, int k_lo, int k_hi,
                                          int offsets) {
    std::vector<BallSpec> fam;
    for (int k = k_lo; k <= k_hi; ++k) {
        double rho = std::ldexp(1.0, k);
        for (int ox = -offsets; ox <= offsets; ++ox)
            for (int oy = -offsets; oy <= offsets; ++oy)
                for (int oz = (d == 3 ? -offsets : 0); oz <= (d == 3 ? offsets : 0); ++oz) {
                    Point c = x;
                    c[0] += 0.25 * rho * ox;
                    c[1] += 0.25 * rho * oy;
                    c[2] += 0.25 * rho * oz;
                    if (dist(c, x) < rho) fam.push_back({c, rho});
                }
    }
    return fam;
}

double riesz_adjoint_at(const std::vector<VectorAtom>& nu, const AmbientParams& amb,
                        const Point& x) {
    amb.validate();
    if (!finite_point(x)) throw std::invalid_argument("non-finite evaluation point");
    double out = 0.0;
    for (const VectorAtom& a : nu) {
        double r = dist(a.pos, x);
        if (r == 0.0) throw SingularityError("riesz_adjoint_at: atom coincides with x");
        double f = 1.0 / std::pow(r, 1.0 + amb.s);
        double dot = a.w[0] * (a.pos[0] - x[0]) + a.w[1] * (a.pos[1] - x[1]) +
                     a.w[2] * (a.pos[2] - x[2]);
        out -= f * dot;
    }
    return out;
}

RieszTree::RieszTree(const AtomicMeasure& mu) : mu_(mu) {
    perm_.resize(mu.size());
    std::iota(perm_.begin(), perm_.end(), 0u);
    nodes_.reserve(mu.size() ? 2 * mu.size() : 1);
    if (mu.size()) root_ = build(0, static_cast<std::uint32_t>(mu.size()));
}

std::int32_t RieszTree::build(std::uint32_t begin, std::uint32_t end) {
    Node n;
    n.begin = begin;
    n.end = end;
    Point lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (std::uint32_t i = begin; i < end; ++i) {
        const Atom& a = mu_.atom(perm_[i]);
        n.mass += a.w;
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], a.pos[c]);
            hi[c] = std::max(hi[c], a.pos[c]);
        }
        n.centroid[0] += a.w * a.pos[0];
        n.centroid[1] += a.w * a.pos[1];
        n.centroid[2] += a.w * a.pos[2];
    }
    for (int c = 0; c < 3; ++c) n.centroid[c] /= n.mass;
    double r2 = 0.0;
    for (std::uint32_t i = begin; i < end; ++i) {
        const Atom& a = mu_.atom(perm_[i]);
        r2 = std::max(r2, dist2(a.pos, n.centroid));
        double ex = a.pos[0] - n.centroid[0];
        double ey = a.pos[1] - n.centroid[1];
        double ez = a.pos[2] - n.centroid[2];
        n.moment[0] += a.w * ex * ex;
        n.moment[1] += a.w * ex * ey;
        n.moment[2] += a.w * ex * ez;
        n.moment[3] += a.w * ey * ey;
        n.moment[4] += a.w * ey * ez;
        n.moment[5] += a.w * ez * ez;
    }
    n.radius = std::sqrt(r2);

    constexpr std::uint32_t leaf_size = 8;
    if (end - begin > leaf_size) {
        int axis = 0;
        double best = -1.0;
        for (int c = 0; c < 3; ++c)
            if (hi[c] - lo[c] > best) { best = hi[c] - lo[c]; axis = c; }
        std::uint32_t mid = (begin + end) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             return mu_.atom(a).pos[axis] < mu_.atom(b).pos[axis];
                         });
        std::int32_t id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(n);
        std::int32_t l = build(begin, mid);
        std::int32_t r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size()) - 1;
}

KernelEval RieszTree::eval(const Point& x, double tol, double theta) const {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const double s = mu_.s();
    KernelEval out;
    if (root_ < 0) return out;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        double D = dist(n.centroid, x);
        if (D > n.radius && n.radius <= theta * D) {
            // the dipole Taylor term vanishes exactly at the mass centroid and
            // the quadrupole term is evaluated from the stored second moment,
            // so the remainder is third order: the bound
            // |D3 K| <= (1+s)(3+6(3+s)+(3+s)(5+s)) r^{-(3+s)} certifies it.
            double gap = D - n.radius;
            double c3 = (1.0 + s) * (3.0 + 6.0 * (3.0 + s) + (3.0 + s) * (5.0 + s)) / 6.0;
            double bound =
                n.mass * c3 * n.radius * n.radius * n.radius / std::pow(gap, s + 3.0);
            double ps = std::pow(D, s);
            if (bound * ps <= tol * n.mass) {
                double zx = n.centroid[0] - x[0], zy = n.centroid[1] - x[1],
                       zz = n.centroid[2] - x[2];
                double inv1 = 1.0 / (ps * D);
                // quadrupole: (1+s) r^{-(2+s)} (-(Sz)/D - tr(S) z/(2D)
                //                               + (3+s) (z.Sz) z / (2 D^3))
                const double* S = n.moment;
                double sx = S[0] * zx + S[1] * zy + S[2] * zz;
                double sy = S[1] * zx + S[3] * zy + S[4] * zz;
                double sz = S[2] * zx + S[4] * zy + S[5] * zz;
                double zSz = zx * sx + zy * sy + zz * sz;
                double tr = S[0] + S[3] + S[5];
                double q = (1.0 + s) * inv1 / (D * D);
                double rad = (3.0 + s) * 0.5 * zSz / (D * D) - 0.5 * tr;
                out.value[0] += n.mass * inv1 * zx + q * (rad * zx - sx);
                out.value[1] += n.mass * inv1 * zy + q * (rad * zy - sy);
                out.value[2] += n.mass * inv1 * zz + q * (rad * zz - sz);
                out.error_bound += bound;
                ++out.terms_used;
                continue;
            }
        }
        if (n.left >= 0) {
            stack.push_back(n.right);
            stack.push_back(n.left);
        } else {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const Atom& a = mu_.atom(perm_[i]);
                double r = dist(a.pos, x);
                if (r == 0.0)
                    throw SingularityError("riesz_field_fast: target coincides with an atom");
                add_kernel_term(out.value, a.pos, x, a.w, s);
                ++out.terms_used;
            }
        }
    }
    return out;
}

std::vector<KernelEval> riesz_field_fast(const AtomicMeasure& mu,
                                         const std::vector<Point>& targets, double tol,
                                         double theta, int threads) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    RieszTree tree(mu);
    std::vector<KernelEval> out(targets.size());
    int nthreads = threads > 0 ? threads
                               : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(targets.size())));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < targets.size(); ++i)
            out[i] = tree.eval(targets[i], tol, theta);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= targets.size()) break;
                try {
                    out[i] = tree.eval(targets[i], tol, theta);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace rw
