#include "sdlab/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdlab/error.hpp"

namespace sdlab::excursion {

namespace {

double capped_increment(double r0, double r1, double dt, double cap) {
    const auto inv2 = [](double r) { return r > 0.0 ? 1.0 / (r * r) : std::numeric_limits<double>::infinity(); };
    return std::min(cap, 0.5 * dt * (inv2(r0) + inv2(r1)));
}

class CellSet {
public:
    explicit CellSet(std::size_t n_cells) : n_cells_(n_cells), seen_(n_cells, false) {}
    void add(const sphere::SpherePoint& pt) {
        const auto c = sphere::cell_index(pt, n_cells_);
        if (!seen_[c]) {
            seen_[c] = true;
            ++count_;
        }
    }
    std::size_t count() const { return count_; }

private:
    std::size_t n_cells_;
    std::vector<bool> seen_;
    std::size_t count_ = 0;
};

}  // namespace

double default_floor(double dt) { return 0.5 * std::sqrt(dt); }

std::vector<ExcursionRecord> extract_excursions(const radial::RadialPath& path, double floor, std::size_t path_id,
                                                bool include_partial) {
    const auto& v = path.values;
    if (v.size() < 3) throw DomainError("extract_excursions: path needs at least 3 points");
    if (!(floor >= 0.1 * std::sqrt(path.dt))) throw DomainError("extract_excursions: floor below 0.1*sqrt(dt)");
    const std::size_t n = v.size();
    std::vector<ExcursionRecord> out;
    std::size_t k = 1;
    while (k < n) {
        if (v[k] < floor || v[k - 1] >= floor) {
            ++k;
            continue;
        }
        std::size_t j = k;
        while (j + 1 < n && v[j + 1] >= floor) ++j;
        const bool closed = j + 1 < n;
        if (closed || include_partial) {
            ExcursionRecord rec;
            rec.path_id = path_id;
            rec.start = k - 1;
            rec.end = closed ? j + 1 : j;
            rec.dt = path.dt;
            rec.zeta = path.dt * static_cast<double>(rec.end - rec.start);
            rec.rho.assign(v.begin() + static_cast<std::ptrdiff_t>(rec.start),
                           v.begin() + static_cast<std::ptrdiff_t>(rec.end) + 1);
            rec.complete = closed;
            out.push_back(std::move(rec));
        }
        k = j + 1;
    }
    return out;
}

void attach_angular(ExcursionRecord& exc, Stream& rng, const AngularOptions& opts, std::span<const std::size_t> keep) {
    const std::size_t n = exc.rho.size();
    if (n < 2) throw DomainError("attach_angular: excursion has fewer than 2 points");
    const std::size_t last = n - 1;
    Stream anchor_rng = rng.child(0);
    Stream pos_rng = rng.child(1);
    Stream neg_rng = rng.child(2);

    exc.U = anchor_rng.uniform();
    if (exc.complete && last >= 2) {
        const auto a = static_cast<std::size_t>(std::llround(exc.U * static_cast<double>(last)));
        exc.anchor = std::clamp<std::size_t>(a, 1, last - 1);
    } else {
        exc.anchor = last;
    }
    const std::size_t a = exc.anchor;

    exc.A_rel.assign(n, 0.0);
    for (std::size_t k = a + 1; k < n; ++k)
        exc.A_rel[k] = exc.A_rel[k - 1] + capped_increment(exc.rho[k - 1], exc.rho[k], exc.dt, opts.cap);
    for (std::size_t k = a; k-- > 0;)
        exc.A_rel[k] = exc.A_rel[k + 1] - capped_increment(exc.rho[k], exc.rho[k + 1], exc.dt, opts.cap);
    exc.span_pos = exc.A_rel[last];
    exc.span_neg = -exc.A_rel[0];

    std::vector<std::size_t> pos_idx{a};
    std::vector<std::size_t> neg_idx{a};
    if (keep.empty()) {
        for (std::size_t k = a + 1; k < n; ++k) pos_idx.push_back(k);
        for (std::size_t k = a; k-- > 0;) neg_idx.push_back(k);
    } else {
        for (auto k : keep) {
            if (k >= n) throw DomainError("attach_angular: keep index out of range");
            if (k > a) pos_idx.push_back(k);
        }
        for (auto it = keep.rbegin(); it != keep.rend(); ++it)
            if (*it < a) neg_idx.push_back(*it);
    }

    std::vector<double> pos_grid, neg_grid;
    pos_grid.reserve(pos_idx.size());
    neg_grid.reserve(neg_idx.size());
    for (auto k : pos_idx) pos_grid.push_back(exc.A_rel[k]);
    for (auto k : neg_idx) neg_grid.push_back(-exc.A_rel[k]);

    const auto anchor_pt = sphere::uniform_point(anchor_rng);
    sphere::SubstepObserver pos_obs, neg_obs;
    std::optional<CellSet> pos_cells, neg_cells;
    if (opts.track_coverage) {
        pos_cells.emplace(opts.n_cells);
        neg_cells.emplace(opts.n_cells);
        pos_obs = [&](double, const sphere::SpherePoint& pt) { pos_cells->add(pt); };
        neg_obs = [&](double, const sphere::SpherePoint& pt) { neg_cells->add(pt); };
    }
    const auto pos = sphere::sphere_path(anchor_pt, pos_grid, opts.sphere, pos_rng, pos_obs);
    const auto neg = sphere::sphere_path(anchor_pt, neg_grid, opts.sphere, neg_rng, neg_obs);

    exc.angular = {};
    exc.angular_index.clear();
    const std::size_t total = pos_idx.size() + neg_idx.size() - 1;
    exc.angular.times.reserve(total);
    exc.angular.points.reserve(total);
    exc.angular_index.reserve(total);
    for (std::size_t j = neg_idx.size(); j-- > 1;) {
        exc.angular_index.push_back(neg_idx[j]);
        exc.angular.times.push_back(exc.A_rel[neg_idx[j]]);
        exc.angular.points.push_back(neg.points[j]);
    }
    for (std::size_t j = 0; j < pos_idx.size(); ++j) {
        exc.angular_index.push_back(pos_idx[j]);
        exc.angular.times.push_back(exc.A_rel[pos_idx[j]]);
        exc.angular.points.push_back(pos.points[j]);
    }
    exc.coverage_pos = pos_cells ? pos_cells->count() : 0;
    exc.coverage_neg = neg_cells ? neg_cells->count() : 0;
    exc.has_angular = true;
}

AssembledX assemble_x_with_radial(const ModelParams& p, const Vec3& x0, const radial::SimConfig& cfg, Stream& rng,
                                  const AssembleOptions& opts) {
    cfg.validate();
    if (opts.stride < 1) throw DomainError("assemble_x: stride must be >= 1");
    const std::size_t steps = cfg.steps();
    const std::size_t stride = opts.stride;
    const double floor = opts.floor > 0.0 ? opts.floor : default_floor(cfg.dt);
    const double r0 = x0.norm();

    Stream radial_rng = rng.child(0);
    Stream x0_sphere_rng = rng.child(1);
    Stream reflected_rng = rng.child(2);
    Stream excursion_root = rng.child(3);

    AssembledX res;
    res.radial.dt = cfg.dt;
    auto& R = res.radial.values;
    R.assign(steps + 1, 0.0);

    const std::size_t n_out = steps / stride + 1;
    auto& out = res.path;
    out.dt = cfg.dt * static_cast<double>(stride);
    out.points.assign(n_out, Vec3{});
    out.segment.assign(n_out, -1);

    std::size_t T = 0;
    if (r0 > 0.0) {
        const auto killed = radial::sample_absorbed_path(p, r0, cfg, radial_rng);
        T = killed.absorbed ? *killed.absorption_index : steps + 1;
        std::copy(killed.values.begin(), killed.values.end(), R.begin());

        const auto tc = skewprod::time_change(killed);
        const std::size_t seg_end = std::min(T, steps + 1);
        std::vector<std::size_t> idx;
        std::vector<double> grid;
        for (std::size_t k = 0; k < seg_end; k += stride) {
            idx.push_back(k);
            grid.push_back(tc.A[k]);
        }
        const auto theta = sphere::sphere_path(sphere::SpherePoint(x0), grid, opts.angular.sphere, x0_sphere_rng);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            out.points[idx[j] / stride] = theta.points[j].unit() * R[idx[j]];
            out.segment[idx[j] / stride] = 0;
        }
    }
    res.reflected_from = T;

    if (T <= steps) {
        const std::size_t remaining = steps - T;
        if (remaining > 0) {
            radial::SimConfig rc;
            rc.dt = cfg.dt;
            rc.t_max = cfg.dt * static_cast<double>(remaining);
            const auto refl = radial::sample_reflected_path(p, 0.0, rc, reflected_rng);
            if (refl.values.size() != remaining + 1) throw DomainError("assemble_x: reflected grid mismatch");
            std::copy(refl.values.begin(), refl.values.end(), R.begin() + static_cast<std::ptrdiff_t>(T));
        }
        R[T] = 0.0;

        for (std::size_t k = T; k <= steps; ++k) {
            if (k % stride == 0 && R[k] < floor) out.zero_hits.push_back(k / stride);
        }
        if (remaining >= 2) {
            radial::RadialPath tail;
            tail.dt = cfg.dt;
            tail.values.assign(R.begin() + static_cast<std::ptrdiff_t>(T), R.end());
            auto excursions = extract_excursions(tail, floor, 0, true);
            std::vector<std::size_t> keep;
            for (std::size_t e = 0; e < excursions.size(); ++e) {
                auto& exc = excursions[e];
                keep.clear();
                for (std::size_t l = 1; l < exc.rho.size(); ++l) {
                    const std::size_t g = T + exc.start + l;
                    if (g % stride == 0 && exc.rho[l] >= floor) keep.push_back(l);
                }
                if (keep.empty()) continue;
                Stream exc_rng = excursion_root.child(e);
                attach_angular(exc, exc_rng, opts.angular, keep);
                for (std::size_t j = 0; j < exc.angular_index.size(); ++j) {
                    const std::size_t l = exc.angular_index[j];
                    const std::size_t g = T + exc.start + l;
                    if (g % stride != 0 || exc.rho[l] < floor) continue;
                    out.points[g / stride] = exc.angular.points[j].unit() * exc.rho[l];
                    out.segment[g / stride] = static_cast<std::int64_t>(e) + 1;
                }
            }
        }
    }
    return res;
}

skewprod::PathR3 assemble_x(const ModelParams& p, const Vec3& x0, const radial::SimConfig& cfg, Stream& rng,
                            const AssembleOptions& opts) {
    return assemble_x_with_radial(p, x0, cfg, rng, opts).path;
}

bool lifetime_integrability(int d) {
    if (d < 2) throw DomainError("lifetime_integrability: d must be >= 2");
    return d < 4;
}

}  // namespace sdlab::excursion
