#include "rw/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rw/errors.hpp"
#include "rw/scales.hpp"

namespace rw {

void CantorParams::validate(double s) const {
    if (N < 0) throw std::invalid_argument("N must be >= 0");
    if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2]");
    if (!(std::pow(1.0 - 3.0 * eps, s) > 0.5))
        throw std::invalid_argument("(1-3eps)^s > 1/2 is required");
    if (!(M > 4.0)) throw std::invalid_argument("M must be > 4");
    if (!(Delta > 0.0)) throw std::invalid_argument("Delta must be positive");
    if (!(delta > 0.0 && delta < std::min(1.0, Delta / std::pow(2.0, s + 1.0))))
        throw std::invalid_argument("delta must lie in (0, min(1, Delta/2^{s+1}))");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0,1]");
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    if (k_cap < 1) throw std::invalid_argument("k_cap must be >= 1");
}

namespace {

// largest good scale 2^-k <= cap, probing at most 'budget' dyadic scales
std::optional<double> largest_good_scale(const AtomicMeasure& mu, const Point& x,
                                         double Delta, double cap, int budget) {
    const double s = mu.s();
    const double thresh = Delta / std::pow(2.0, s);
    int k = 0;
    while (std::ldexp(1.0, -k) > cap) ++k;
    for (int probes = 0; probes <= budget; ++probes, ++k) {
        double r = std::ldexp(1.0, -k);
        if (mu.ball_mass(x, r) > thresh * std::pow(r, s)) return r;
    }
    return std::nullopt;
}

double set_min_dist(const AtomicMeasure& mu, const std::vector<std::size_t>& a,
                    const std::vector<std::size_t>& b, double early_exit_below) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : a) {
        for (std::size_t j : b) {
            best = std::min(best, dist(mu.atom(i).pos, mu.atom(j).pos));
            if (best < early_exit_below) return best;
        }
    }
    return best;
}

struct Box {
    Point lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    void add(const Point& p) {
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    double dist_to(const Box& o) const {
        double d2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            double t = std::max({lo[c] - o.hi[c], 0.0, o.lo[c] - hi[c]});
            d2 += t * t;
        }
        return std::sqrt(d2);
    }
};

}  // namespace

std::vector<TopCoverBall> build_top_cover(const AtomicMeasure& mu,
                                          const AdmissibleTriple& triple, double Delta,
                                          double eps, int good_scale_budget) {
    const double cap = eps * triple.ball.radius / 4.0;
    struct Cand {
        std::size_t idx;
        double r;
    };
    std::vector<Cand> cands;
    cands.reserve(triple.etilde_atoms.size());
    for (std::size_t a : triple.etilde_atoms) {
        auto r = largest_good_scale(mu, mu.atom(a).pos, Delta, cap, good_scale_budget);
        if (!r)
            throw InsufficientScalesError(
                "build_top_cover: no good scale <= eps*rho/4 at atom " + std::to_string(a), a);
        cands.push_back({a, *r});
    }

    std::vector<TopCoverBall> selected;
    std::vector<bool> covered(cands.size(), false);
    std::size_t n_covered = 0;
    while (n_covered < cands.size()) {
        // largest-radius candidate disjoint from all selected B(z_j, r_j); ties
        // broken by lowest atom index (candidates are in ascending index order)
        std::size_t best = cands.size();
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (best < cands.size() && !(cands[c].r > cands[best].r)) continue;
            const Point& x = mu.atom(cands[c].idx).pos;
            bool disjoint = true;
            for (const TopCoverBall& t : selected)
                if (dist(x, t.z) < cands[c].r + t.r) { disjoint = false; break; }
            if (disjoint) best = c;
        }
        if (best == cands.size())
            throw ConstructionFailure("build_top_cover: no selectable ball but atoms uncovered");
        const Cand& w = cands[best];
        selected.push_back({mu.atom(w.idx).pos, w.r, w.idx});
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (covered[c]) continue;
            if (dist(mu.atom(cands[c].idx).pos, selected.back().z) < 2.0 * selected.back().r) {
                covered[c] = true;
                ++n_covered;
            }
        }
    }
    return selected;
}

std::optional<double> find_low_density_scale(const AtomicMeasure& mu, const Point& x,
                                             const TopCoverBall& top, double M,
                                             double delta, int q) {
    const double s = mu.s();
    const double dz = dist(x, top.z);
    // mass of atoms sitting exactly at x: a ball of any radius weighs at least
    // this much, which prunes scales where the test cannot pass
    double w0 = 0.0;
    for (std::size_t i : mu.ball_indices(x, 1e-300)) w0 += mu.atom(i).w;
    for (int l = 0; l <= q; ++l) {
        double t = std::ldexp(top.r, -l);
        // clearance: B(x, Mt) inside T_j = B(z, 4r) with margin r
        if (dz + M * t > 3.0 * top.r) continue;
        double thresh = delta * std::pow(t, s);
        if (w0 > thresh) continue;
        if (mu.ball_mass(x, M * t) <= thresh) return t;
    }
    return std::nullopt;
}

double shrink_to_stable_radius(const AtomicMeasure& mu, const Point& x, double t_x,
                               double eps, int d, int k_cap) {
    const double lam = 1.0 - 3.0 * eps;
    double radius = t_x;
    for (int k = 0; k <= k_cap; ++k) {
        double outer = mu.ball_mass(x, radius);
        double inner = mu.ball_mass(x, lam * radius);
        if (outer - inner <= 3.0 * d * eps * outer) return radius;
        radius *= lam;
    }
    throw ConstructionFailure("shrink_to_stable_radius: annulus cap exceeded at t_x=" +
                              std::to_string(t_x));
}

std::vector<BesicovitchCandidate> build_bottom_cover(
    const std::vector<BesicovitchCandidate>& candidates) {
    std::vector<BesicovitchCandidate> selected;
    std::vector<bool> covered(candidates.size(), false);
    std::size_t n_covered = 0;
    while (n_covered < candidates.size()) {
        std::size_t best = candidates.size();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (covered[c]) continue;
            if (best < candidates.size() && !(candidates[c].rho > candidates[best].rho))
                continue;
            best = c;  // ascending atom order gives lowest-index tie break
        }
        if (best == candidates.size()) break;
        selected.push_back(candidates[best]);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (covered[c]) continue;
            if (dist(candidates[c].x, selected.back().x) < selected.back().rho ||
                c == best) {
                covered[c] = true;
                ++n_covered;
            }
        }
    }
    return selected;
}

int probe_multiplicity(const std::vector<BesicovitchCandidate>& balls, int grid_n, int d) {
    if (balls.empty()) return 0;
    Box box;
    for (const auto& b : balls) {
        Point lo = b.x, hi = b.x;
        for (int c = 0; c < d; ++c) { lo[c] -= b.rho; hi[c] += b.rho; }
        box.add(lo);
        box.add(hi);
    }
    int best = 0;
    auto count_at = [&](const Point& p) {
        int c = 0;
        for (const auto& b : balls)
            if (dist(p, b.x) < b.rho) ++c;
        return c;
    };
    if (d == 2) {
        for (int i = 0; i <= grid_n; ++i)
            for (int j = 0; j <= grid_n; ++j) {
                Point p{box.lo[0] + (box.hi[0] - box.lo[0]) * i / grid_n,
                        box.lo[1] + (box.hi[1] - box.lo[1]) * j / grid_n, 0.0};
                best = std::max(best, count_at(p));
            }
    } else {
        for (int i = 0; i <= grid_n; ++i)
            for (int j = 0; j <= grid_n; ++j)
                for (int k = 0; k <= grid_n; ++k) {
                    Point p{box.lo[0] + (box.hi[0] - box.lo[0]) * i / grid_n,
                            box.lo[1] + (box.hi[1] - box.lo[1]) * j / grid_n,
                            box.lo[2] + (box.hi[2] - box.lo[2]) * k / grid_n};
                    best = std::max(best, count_at(p));
                }
    }
    // ball centers are the natural worst-case probes
    for (const auto& b : balls) best = std::max(best, count_at(b.x));
    return best;
}

BuildLevelResult build_level(const AtomicMeasure& mu, const AdmissibleTriple& triple,
                             const CantorParams& params, int good_scale_budget) {
    params.validate(mu.s());
    BuildLevelResult out;
    out.report.mass_before = 0.0;
    for (std::size_t a : triple.etilde_atoms) out.report.mass_before += mu.atom(a).w;
    if (triple.etilde_atoms.empty()) return out;

    out.top_cover = build_top_cover(mu, triple, params.Delta, params.eps, good_scale_budget);
    {
        double tmass = 0.0;
        for (const auto& t : out.top_cover) tmass += mu.ball_mass(t.z, 4.0 * t.r);
        double omass = 0.0;
        for (std::size_t a : triple.omega_atoms) omass += mu.atom(a).w;
        out.report.top_mass_ratio = omass > 0.0 ? tmass / omass : 0.0;
    }

    // associated top ball per E~ atom: lowest index j with x in B(z_j, 2 r_j);
    // the Vitali guarantee makes r_j >= r_x for that j
    const double cap = params.eps * triple.ball.radius / 4.0;
    std::vector<BesicovitchCandidate> cands;
    std::vector<int> atom_top(triple.etilde_atoms.size(), -1);
    std::vector<bool> in_F(triple.etilde_atoms.size(), false);
    for (std::size_t ci = 0; ci < triple.etilde_atoms.size(); ++ci) {
        std::size_t a = triple.etilde_atoms[ci];
        const Point& x = mu.atom(a).pos;
        int jx = -1;
        for (std::size_t j = 0; j < out.top_cover.size(); ++j)
            if (dist(x, out.top_cover[j].z) < 2.0 * out.top_cover[j].r) { jx = (int)j; break; }
        if (jx < 0)
            throw ConstructionFailure("build_level: Vitali cover misses atom " +
                                      std::to_string(a));
        atom_top[ci] = jx;
        auto t = find_low_density_scale(mu, x, out.top_cover[jx], params.M, params.delta,
                                        params.q);
        if (!t) {
            in_F[ci] = true;
            ++out.report.exceptional_count;
            continue;
        }
        double rho =
            shrink_to_stable_radius(mu, x, *t, params.eps, mu.d(), params.k_cap);
        cands.push_back({a, x, rho});
    }
    (void)cap;

    auto selected = build_bottom_cover(cands);
    if (selected.empty())
        throw ConstructionFailure(
            "build_level: empty children (all atoms lost to the exceptional set; lost mass " +
            std::to_string(out.report.mass_before) + ")");
    out.report.besicovitch_max_multiplicity = probe_multiplicity(selected, 64, mu.d());

    // B~_j = closure((1-3eps) B_j) \ union_{i<j} B_i, atoms assigned in order
    const double shrink = 1.0 - 3.0 * params.eps;
    std::vector<std::vector<std::size_t>> core(selected.size());
    for (std::size_t a : triple.omega_atoms) {
        const Point& p = mu.atom(a).pos;
        for (std::size_t j = 0; j < selected.size(); ++j) {
            if (dist(p, selected[j].x) > shrink * selected[j].rho) {
                if (dist(p, selected[j].x) < selected[j].rho) break;  // in B_j \ (1-3eps)B_j: lost
                continue;
            }
            bool excluded = false;
            for (std::size_t i = 0; i < j; ++i)
                if (dist(p, selected[i].x) < selected[i].rho) { excluded = true; break; }
            if (!excluded) core[j].push_back(a);
            break;
        }
    }

    std::vector<bool> etilde_flag(mu.size(), false);
    for (std::size_t ci = 0; ci < triple.etilde_atoms.size(); ++ci)
        if (!in_F[ci]) etilde_flag[triple.etilde_atoms[ci]] = true;

    for (std::size_t j = 0; j < selected.size(); ++j) {
        Cell cell;
        cell.level = triple.level + 1;
        cell.atoms = core[j];
        for (std::size_t a : core[j])
            if (etilde_flag[a]) cell.etilde.push_back(a);
        cell.bottom = Ball{selected[j].x, selected[j].rho};
        cell.halo = params.eps * selected[j].rho;
        // associated top ball of the generating candidate's atom
        auto it = std::lower_bound(triple.etilde_atoms.begin(), triple.etilde_atoms.end(),
                                   selected[j].atom_index);
        cell.top_index = atom_top[static_cast<std::size_t>(it - triple.etilde_atoms.begin())];
        out.cells.push_back(std::move(cell));
    }

    out.report.mass_after = 0.0;
    for (const Cell& c : out.cells)
        for (std::size_t a : c.etilde) out.report.mass_after += mu.atom(a).w;

    // property (d): same-level separation >= eps * max(rho_i, rho_j)
    std::vector<Box> boxes(out.cells.size());
    for (std::size_t j = 0; j < out.cells.size(); ++j)
        for (std::size_t a : out.cells[j].atoms) boxes[j].add(mu.atom(a).pos);
    for (std::size_t i = 0; i < out.cells.size(); ++i)
        for (std::size_t j = i + 1; j < out.cells.size(); ++j) {
            double need =
                params.eps * std::max(out.cells[i].bottom.radius, out.cells[j].bottom.radius);
            if (out.cells[i].atoms.empty() || out.cells[j].atoms.empty()) continue;
            if (boxes[i].dist_to(boxes[j]) >= need) continue;
            double got = set_min_dist(mu, out.cells[i].atoms, out.cells[j].atoms, need);
            if (got < need)
                throw ConstructionFailure("build_level: separation violation between cells " +
                                          std::to_string(i) + " and " + std::to_string(j));
        }

    // property (e): mu(M B_j) <= 2 M^s delta rho_j^s
    const double s = mu.s();
    for (const Cell& c : out.cells) {
        double lhs = mu.ball_mass(c.bottom.center, params.M * c.bottom.radius);
        double rhs = 2.0 * std::pow(params.M, s) * params.delta * std::pow(c.bottom.radius, s);
        if (!(lhs <= rhs))
            throw ConstructionFailure("build_level: low-density property failed on a cell");
    }

    // property (g): M rho_j <= r_k, B_j inside T_k with clearance r_k
    for (const Cell& c : out.cells) {
        const TopCoverBall& t = out.top_cover[static_cast<std::size_t>(c.top_index)];
        bool ok = params.M * c.bottom.radius <= t.r &&
                  dist(c.bottom.center, t.z) + c.bottom.radius <= 3.0 * t.r;
        if (!ok)
            throw ConstructionFailure("build_level: top-ball association property failed");
    }

    for (const Cell& c : out.cells) {
        AdmissibleTriple child;
        child.omega_atoms = c.atoms;
        child.etilde_atoms = c.etilde;
        child.ball = c.bottom;
        child.halo = c.halo;
        child.level = c.level;
        out.children.push_back(std::move(child));
    }
    return out;
}

namespace {

double exact_diameter(const AtomicMeasure& mu, const std::vector<std::size_t>& idx) {
    if (idx.size() < 2) return 0.0;
    if (mu.d() == 2) {
        // convex hull (monotone chain), then brute force over hull vertices
        std::vector<Point> pts;
        pts.reserve(idx.size());
        for (std::size_t a : idx) pts.push_back(mu.atom(a).pos);
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
            return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
        });
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        auto cross = [](const Point& o, const Point& a, const Point& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        std::vector<Point> hull(2 * pts.size() + 1);
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
            hull[k++] = pts[i];
        }
        for (std::size_t i = pts.size(), lower = k + 1; i-- > 0;) {
            while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
            hull[k++] = pts[i];
        }
        hull.resize(k > 1 ? k - 1 : k);
        double best = 0.0;
        for (std::size_t i = 0; i < hull.size(); ++i)
            for (std::size_t j = i + 1; j < hull.size(); ++j)
                best = std::max(best, dist(hull[i], hull[j]));
        return best;
    }
    double best = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            best = std::max(best, dist(mu.atom(idx[i]).pos, mu.atom(idx[j]).pos));
    return best;
}

}  // namespace

CantorTree build_cantor_tree(const AtomicMeasure& mu,
                             const std::vector<std::size_t>& E_atoms,
                             const CantorParams& params) {
    params.validate(mu.s());
    CantorTree tree;
    tree.mu = &mu;
    tree.params = params;

    std::vector<std::size_t> E = E_atoms;
    if (E.empty()) {
        E.resize(mu.size());
        std::iota(E.begin(), E.end(), std::size_t{0});
    }
    std::sort(E.begin(), E.end());
    if (E.empty()) throw std::invalid_argument("build_cantor_tree: empty measure");

    Cell root;
    root.level = 0;
    root.atoms = E;
    root.etilde = E;
    root.bottom = Ball{mu.atom(E.front()).pos,
                       2.0 * exact_diameter(mu, E) + 4.0 / params.eps};
    root.halo = params.eps * root.bottom.radius;
    tree.levels.push_back({root});

    const double per_level =
        params.q + std::log2(params.M) + std::log2(1.0 / params.eps) + 3.0;
    for (int k = 0; k < params.N; ++k) {
        int budget = static_cast<int>(std::ceil((params.N - k) * per_level));
        std::vector<Cell> next;
        std::vector<TopCoverBall> cover;
        LevelReport rep;
        for (std::size_t c = 0; c < tree.levels[k].size(); ++c) {
            const Cell& cell = tree.levels[k][c];
            AdmissibleTriple triple{cell.atoms, cell.etilde, cell.bottom, cell.halo,
                                    cell.level};
            BuildLevelResult res;
            try {
                res = build_level(mu, triple, params, budget);
            } catch (const ConstructionFailure& e) {
                throw ConstructionFailure("level " + std::to_string(k + 1) + ", cell " +
                                          std::to_string(c) + ": " + e.what());
            }
            int cover_offset = static_cast<int>(cover.size());
            for (Cell cc : res.cells) {
                cc.parent = static_cast<int>(c);
                cc.top_index += cover_offset;
                next.push_back(std::move(cc));
            }
            cover.insert(cover.end(), res.top_cover.begin(), res.top_cover.end());
            rep.mass_before += res.report.mass_before;
            rep.mass_after += res.report.mass_after;
            rep.exceptional_count += res.report.exceptional_count;
            rep.top_mass_ratio = std::max(rep.top_mass_ratio, res.report.top_mass_ratio);
            rep.besicovitch_max_multiplicity =
                std::max(rep.besicovitch_max_multiplicity,
                         res.report.besicovitch_max_multiplicity);
        }
        if (next.empty())
            throw ConstructionFailure("build_cantor_tree: no cells at level " +
                                      std::to_string(k + 1));
        rep.top_cover = cover;
        tree.covers.push_back(std::move(cover));
        tree.reports.push_back(std::move(rep));
        tree.levels.push_back(std::move(next));
    }

    for (const Cell& c : tree.levels.back())
        tree.support.insert(tree.support.end(), c.atoms.begin(), c.atoms.end());
    std::sort(tree.support.begin(), tree.support.end());
    tree.support.erase(std::unique(tree.support.begin(), tree.support.end()),
                       tree.support.end());
    tree.mu_prime_w.reserve(tree.support.size());
    for (std::size_t a : tree.support) tree.mu_prime_w.push_back(mu.atom(a).w);
    tree.retained_fraction =
        mu.total_mass() > 0.0 ? tree.mu_prime_mass() / mu.total_mass() : 0.0;
    return tree;
}

double CantorTree::mu_prime_mass() const {
    double m = 0.0;
    for (double w : mu_prime_w) m += w;
    return m;
}

int CantorTree::ancestor(int cell, int k) const {
    int level = static_cast<int>(levels.size()) - 1;
    int c = cell;
    while (level > k) {
        c = levels[level][static_cast<std::size_t>(c)].parent;
        --level;
    }
    return c;
}

int CantorTree::final_cell_of_atom(std::size_t a) const {
    const auto& last = levels.back();
    for (std::size_t c = 0; c < last.size(); ++c)
        if (std::binary_search(last[c].atoms.begin(), last[c].atoms.end(), a))
            return static_cast<int>(c);
    return -1;
}

VerifyReport verify_construction(const CantorTree& tree) {
    VerifyReport rep;
    const AtomicMeasure& mu = *tree.mu;

    {
        VerifyProperty p{"domination", true, ""};
        for (std::size_t i = 0; i < tree.support.size(); ++i)
            if (!(tree.mu_prime_w[i] <= mu.atom(tree.support[i]).w)) {
                p.pass = false;
                p.witness = "atom " + std::to_string(tree.support[i]);
                break;
            }
        rep.properties.push_back(p);
    }
    {
        VerifyProperty p{"separation", true, ""};
        // support separation per cell: mu' atoms outside the cell vs inside
        for (std::size_t lvl = 1; lvl < tree.levels.size() && p.pass; ++lvl) {
            for (std::size_t c = 0; c < tree.levels[lvl].size() && p.pass; ++c) {
                const Cell& cell = tree.levels[lvl][c];
                double need = tree.params.eps * cell.bottom.radius;
                std::vector<bool> inside(mu.size(), false);
                for (std::size_t a : cell.atoms) inside[a] = true;
                for (std::size_t a : tree.support) {
                    if (inside[a]) continue;
                    for (std::size_t b : cell.atoms) {
                        if (std::binary_search(tree.support.begin(), tree.support.end(),
                                               b) &&
                            dist(mu.atom(a).pos, mu.atom(b).pos) < need) {
                            p.pass = false;
                            p.witness = "atoms " + std::to_string(a) + "," + std::to_string(b) +
                                        " at level " + std::to_string(lvl);
                            break;
                        }
                    }
                    if (!p.pass) break;
                }
            }
        }
        rep.properties.push_back(p);
    }
    {
        VerifyProperty p{"significant_mass", true, ""};
        double need = tree.params.gamma / 2.0 * mu.total_mass();
        if (!(tree.mu_prime_mass() >= need)) {
            p.pass = false;
            p.witness = "mu' mass " + std::to_string(tree.mu_prime_mass()) + " < " +
                        std::to_string(need);
        }
        rep.properties.push_back(p);
    }
    for (const auto& p : rep.properties) rep.all_pass = rep.all_pass && p.pass;
    return rep;
}

}  // namespace rw
