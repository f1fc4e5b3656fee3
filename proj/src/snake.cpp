#include "randmaps/snake.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace randmaps {

void SnakeGrid::finalize() {
    RM_CHECK(m >= 2 && static_cast<std::int64_t>(e.size()) == m + 1 &&
                 static_cast<std::int64_t>(Z.size()) == m + 1,
             "snake grid arrays inconsistent");
    RM_CHECK(e[0] == 0.0 && e[static_cast<std::size_t>(m)] == 0.0, "excursion endpoints");
    s_star = 0;
    for (std::int64_t k = 1; k <= m; ++k)
        if (Z[static_cast<std::size_t>(k)] < Z[static_cast<std::size_t>(s_star)]) s_star = k;
    delta = -Z[static_cast<std::size_t>(s_star)];
    if (delta == 0.0) delta = 0.0;  // normalize -0
    delta_refined = delta;
    refined = false;
}

static std::vector<double> vervaat_excursion(std::int64_t m, Rng& rng) {
    const double step_sd = 1.0 / std::sqrt(static_cast<double>(m));
    for (;;) {
        std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
        for (std::int64_t k = 1; k <= m; ++k)
            w[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k - 1)] + step_sd * rng.normal();
        const double drift = w[static_cast<std::size_t>(m)];
        // bridge, then rotate at the (first) minimum
        std::int64_t kmin = 0;
        double vmin = 0.0;
        std::vector<double> b(static_cast<std::size_t>(m), 0.0);
        for (std::int64_t k = 0; k < m; ++k) {
            b[static_cast<std::size_t>(k)] =
                w[static_cast<std::size_t>(k)] - drift * static_cast<double>(k) / static_cast<double>(m);
            if (b[static_cast<std::size_t>(k)] < vmin) {
                vmin = b[static_cast<std::size_t>(k)];
                kmin = k;
            }
        }
        std::vector<double> e(static_cast<std::size_t>(m) + 1, 0.0);
        bool ok = true;
        for (std::int64_t j = 1; j < m; ++j) {
            double v = b[static_cast<std::size_t>((kmin + j) % m)] - vmin;
            if (v <= 0.0) {
                ok = false;
                break;
            }
            e[static_cast<std::size_t>(j)] = v;
        }
        if (ok) return e;
    }
}

static std::vector<double> dyck_excursion(std::int64_t m, Rng& rng) {
    const std::int64_t N = std::max<std::int64_t>(1024, 4 * m * m);
    // 2N+1 steps, N up and N+1 down, rotated to the unique first-passage
    // arrangement (cycle lemma), last step dropped
    std::vector<std::int8_t> steps(static_cast<std::size_t>(2 * N + 1), -1);
    // choose positions of the N up-steps
    std::int64_t need = N;
    for (std::int64_t t = 0; t < 2 * N + 1 && need > 0; ++t) {
        if (rng.uniform_below(static_cast<std::uint64_t>(2 * N + 1 - t)) <
            static_cast<std::uint64_t>(need)) {
            steps[static_cast<std::size_t>(t)] = 1;
            --need;
        }
    }
    std::int64_t s = 0, min_s = 0, rot = 0;
    for (std::int64_t t = 0; t < 2 * N + 1; ++t) {
        s += steps[static_cast<std::size_t>(t)];
        if (s < min_s) {
            min_s = s;
            rot = t + 1;
        }
    }
    // contour heights after rotation; position 2N+1 would be the dropped step
    std::vector<double> e(static_cast<std::size_t>(m) + 1, 0.0);
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
    std::int64_t h = 0;
    std::int64_t next_grid = 1;
    for (std::int64_t t = 0; t < 2 * N && next_grid < m; ++t) {
        h += steps[static_cast<std::size_t>((rot + t) % (2 * N + 1))];
        std::int64_t grid_pos = next_grid;
        while (grid_pos < m &&
               t + 1 == (2 * N * grid_pos) / m) {
            e[static_cast<std::size_t>(grid_pos)] = static_cast<double>(h) * scale;
            ++grid_pos;
        }
        next_grid = grid_pos;
    }
    // interior zeros are possible on the lattice; nudge is not allowed, so
    // resample in that case
    for (std::int64_t j = 1; j < m; ++j)
        if (e[static_cast<std::size_t>(j)] <= 0.0) return dyck_excursion(m, rng);
    return e;
}

std::vector<double> sample_excursion(std::int64_t m, Rng& rng, ExcursionMethod method) {
    RM_CHECK(m >= 2, "need m >= 2");
    return method == ExcursionMethod::Vervaat ? vervaat_excursion(m, rng)
                                              : dyck_excursion(m, rng);
}

static std::vector<double> labels_dense(const std::vector<double>& e, Rng& rng,
                                        bool* regularized) {
    const auto m = static_cast<std::int64_t>(e.size()) - 1;
    const std::int64_t n = m - 1;  // interior points; Z_0 = Z_m = 0
    // covariance C_{jk} = min e over [j..k]
    std::vector<double> cov(static_cast<std::size_t>(n * n));
    for (std::int64_t i = 0; i < n; ++i) {
        double running = e[static_cast<std::size_t>(i + 1)];
        for (std::int64_t j = i; j < n; ++j) {
            running = std::min(running, e[static_cast<std::size_t>(j + 1)]);
            cov[static_cast<std::size_t>(i * n + j)] = running;
            cov[static_cast<std::size_t>(j * n + i)] = running;
        }
    }
    std::vector<double> chol(static_cast<std::size_t>(n * n), 0.0);
    auto attempt = [&](double reg) {
        for (auto& x : chol) x = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
            double d = cov[static_cast<std::size_t>(j * n + j)] + reg;
            for (std::int64_t k = 0; k < j; ++k)
                d -= chol[static_cast<std::size_t>(j * n + k)] * chol[static_cast<std::size_t>(j * n + k)];
            if (d <= 0.0) return false;
            chol[static_cast<std::size_t>(j * n + j)] = std::sqrt(d);
            for (std::int64_t i = j + 1; i < n; ++i) {
                double s = cov[static_cast<std::size_t>(i * n + j)];
                for (std::int64_t k = 0; k < j; ++k)
                    s -= chol[static_cast<std::size_t>(i * n + k)] * chol[static_cast<std::size_t>(j * n + k)];
                chol[static_cast<std::size_t>(i * n + j)] = s / chol[static_cast<std::size_t>(j * n + j)];
            }
        }
        return true;
    };
    bool reg = false;
    if (!attempt(0.0)) {
        reg = true;
        if (!attempt(1e-12)) throw Error("label covariance not PSD even after regularization");
    }
    if (regularized) *regularized = reg;
    std::vector<double> g(static_cast<std::size_t>(n));
    for (auto& x : g) x = rng.normal();
    std::vector<double> z(static_cast<std::size_t>(m) + 1, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::int64_t k = 0; k <= i; ++k)
            s += chol[static_cast<std::size_t>(i * n + k)] * g[static_cast<std::size_t>(k)];
        z[static_cast<std::size_t>(i + 1)] = s;
    }
    return z;
}

// Snake-stack recursion: keep the label path along the current tree branch as
// (height, value) knots; shrinking to height h inside a knot interval samples
// a Brownian-bridge point, growing appends an independent increment.
//
// When refined_min is given, every branch segment that gets discarded also
// yields an exact sample of its interior minimum (the minimum of a Brownian
// bridge with known endpoints), so the returned value is the true minimum of
// the label field over the whole tree coded by the interpolated excursion,
// not just over the grid times.
static std::vector<double> labels_treerec(const std::vector<double>& e, Rng& rng,
                                          double* refined_min = nullptr) {
    const auto m = static_cast<std::int64_t>(e.size()) - 1;
    std::vector<double> z(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<std::pair<double, double>> path{{0.0, 0.0}};  // (height, value)
    double global_min = 0.0;
    auto piece_min = [&](const std::pair<double, double>& lo,
                         const std::pair<double, double>& hi) {
        if (!refined_min) return;
        double len = hi.first - lo.first;
        if (len <= 0.0) {
            global_min = std::min(global_min, std::min(lo.second, hi.second));
            return;
        }
        double d = lo.second - hi.second;
        double u = rng.uniform_pos();
        double low = 0.5 * (lo.second + hi.second - std::sqrt(d * d - 2.0 * len * std::log(u)));
        global_min = std::min(global_min, low);
    };
    for (std::int64_t k = 1; k <= m; ++k) {
        double hk = e[static_cast<std::size_t>(k)];
        double shrink = std::min(e[static_cast<std::size_t>(k - 1)], hk);
        std::pair<double, double> popped{0.0, 0.0};
        bool have_popped = false;
        while (path.back().first > shrink) {
            if (have_popped) piece_min(path.back(), popped);  // fully discarded segment
            popped = path.back();
            have_popped = true;
            path.pop_back();
        }
        if (have_popped && shrink > path.back().first) {
            auto [a, za] = path.back();
            auto [b, zb] = popped;
            double t = (shrink - a) / (b - a);
            double mean = za + t * (zb - za);
            double var = (shrink - a) * (b - shrink) / (b - a);
            path.emplace_back(shrink, mean + std::sqrt(var) * rng.normal());
            piece_min(path.back(), popped);  // upper part of the split segment
        } else if (have_popped) {
            piece_min(path.back(), popped);  // segment ended exactly at a knot
        }
        if (hk > path.back().first)
            path.emplace_back(hk, path.back().second +
                                      std::sqrt(hk - path.back().first) * rng.normal());
        z[static_cast<std::size_t>(k)] = path.back().second;
    }
    if (refined_min) {
        while (path.size() > 1) {
            auto hi = path.back();
            path.pop_back();
            piece_min(path.back(), hi);
        }
        *refined_min = global_min;
    }
    return z;
}

std::vector<double> sample_labels(const std::vector<double>& e, Rng& rng, LabelMethod method,
                                  bool* regularized, double* refined_min) {
    const auto m = static_cast<std::int64_t>(e.size()) - 1;
    RM_CHECK(m >= 2, "need m >= 2");
    if (regularized) *regularized = false;
    if (refined_min) *refined_min = 0.0;
    if (method == LabelMethod::Auto)
        method = m <= 1024 ? LabelMethod::DenseCholesky : LabelMethod::TreeRecursion;
    return method == LabelMethod::DenseCholesky ? labels_dense(e, rng, regularized)
                                                : labels_treerec(e, rng, refined_min);
}

SnakeGrid sample_snake(std::int64_t m, Rng& rng, ExcursionMethod em, LabelMethod lm) {
    SnakeGrid g;
    g.m = m;
    g.e = sample_excursion(m, rng, em);
    if (lm == LabelMethod::Auto) lm = m <= 1024 ? LabelMethod::DenseCholesky : LabelMethod::TreeRecursion;
    if (lm == LabelMethod::TreeRecursion) {
        double rmin = 0.0;
        g.Z = sample_labels(g.e, rng, lm, nullptr, &rmin);
        g.finalize();
        g.delta_refined = -rmin;
        g.refined = true;
    } else {
        g.Z = sample_labels(g.e, rng, lm);
        g.finalize();
    }
    return g;
}

SnakeGrid sample_snake_refined(std::int64_t m, std::int64_t factor, Rng& rng) {
    RM_CHECK(m >= 2 && factor >= 1, "need m >= 2, factor >= 1");
    const std::int64_t M = m * factor;
    std::vector<double> ef = sample_excursion(M, rng);
    double rmin = 0.0;
    std::vector<double> zf = labels_treerec(ef, rng, &rmin);
    SnakeGrid g;
    g.m = m;
    g.e.resize(static_cast<std::size_t>(m) + 1);
    g.Z.resize(static_cast<std::size_t>(m) + 1);
    for (std::int64_t k = 0; k <= m; ++k) {
        g.e[static_cast<std::size_t>(k)] = ef[static_cast<std::size_t>(k * factor)];
        g.Z[static_cast<std::size_t>(k)] = zf[static_cast<std::size_t>(k * factor)];
    }
    g.finalize();
    g.delta_refined = -rmin;
    g.refined = true;
    return g;
}

double dcirc(const SnakeGrid& g, std::int64_t j, std::int64_t k) {
    if (j > k) std::swap(j, k);
    double inner = g.Z[static_cast<std::size_t>(j)];
    for (std::int64_t t = j; t <= k; ++t)
        inner = std::min(inner, g.Z[static_cast<std::size_t>(t)]);
    double outer = g.Z[static_cast<std::size_t>(k)];
    for (std::int64_t t = k; t <= g.m; ++t)
        outer = std::min(outer, g.Z[static_cast<std::size_t>(t)]);
    for (std::int64_t t = 0; t <= j; ++t)
        outer = std::min(outer, g.Z[static_cast<std::size_t>(t)]);
    return g.Z[static_cast<std::size_t>(j)] + g.Z[static_cast<std::size_t>(k)] -
           2.0 * std::max(inner, outer);
}

MetricSample dstar_grid(const SnakeGrid& g) {
    const std::int64_t n = g.m + 1;
    MetricSample ms;
    ms.m = g.m;
    ms.dcirc_mat.assign(static_cast<std::size_t>(n * n), 0.0);
    // prefix minima make the full dcirc matrix O(n^2)
    std::vector<double> pre(static_cast<std::size_t>(n)), suf(static_cast<std::size_t>(n));
    pre[0] = g.Z[0];
    for (std::int64_t t = 1; t < n; ++t)
        pre[static_cast<std::size_t>(t)] = std::min(pre[static_cast<std::size_t>(t - 1)], g.Z[static_cast<std::size_t>(t)]);
    suf[static_cast<std::size_t>(n - 1)] = g.Z[static_cast<std::size_t>(n - 1)];
    for (std::int64_t t = n - 2; t >= 0; --t)
        suf[static_cast<std::size_t>(t)] = std::min(suf[static_cast<std::size_t>(t + 1)], g.Z[static_cast<std::size_t>(t)]);
    for (std::int64_t j = 0; j < n; ++j) {
        double inner = g.Z[static_cast<std::size_t>(j)];
        for (std::int64_t k = j; k < n; ++k) {
            inner = std::min(inner, g.Z[static_cast<std::size_t>(k)]);
            double outer = std::min(suf[static_cast<std::size_t>(k)], pre[static_cast<std::size_t>(j)]);
            double v = g.Z[static_cast<std::size_t>(j)] + g.Z[static_cast<std::size_t>(k)] -
                       2.0 * std::max(inner, outer);
            ms.dcirc_mat[static_cast<std::size_t>(j * n + k)] = v;
            ms.dcirc_mat[static_cast<std::size_t>(k * n + j)] = v;
        }
    }
    ms.dstar_mat = ms.dcirc_mat;
    auto* d = ms.dstar_mat.data();
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::int64_t k = 0; k < n; ++k) {
            const double* dk = d + k * n;
            for (std::int64_t i = 0; i < n; ++i) {
                const double dik = d[i * n + k];
                double* di = d + i * n;
                for (std::int64_t j = 0; j < n; ++j) {
                    double via = dik + dk[j];
                    if (via < di[j]) {
                        di[j] = via;
                        changed = true;
                    }
                }
            }
        }
    }
    return ms;
}

namespace {
struct RangeMin {
    std::int64_t n = 0;
    std::vector<std::vector<double>> table;
    explicit RangeMin(const std::vector<double>& x) {
        n = static_cast<std::int64_t>(x.size());
        table.push_back(x);
        for (std::int64_t len = 2; len <= n; len *= 2) {
            const auto& prev = table.back();
            std::vector<double> row(static_cast<std::size_t>(n - len + 1));
            for (std::int64_t i = 0; i + len <= n; ++i)
                row[static_cast<std::size_t>(i)] =
                    std::min(prev[static_cast<std::size_t>(i)],
                             prev[static_cast<std::size_t>(i + len / 2)]);
            table.push_back(std::move(row));
        }
    }
    double query(std::int64_t l, std::int64_t r) const {  // inclusive
        std::int64_t len = r - l + 1;
        int k = 63 - __builtin_clzll(static_cast<unsigned long long>(len));
        return std::min(table[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)],
                        table[static_cast<std::size_t>(k)][static_cast<std::size_t>(r - (1LL << k) + 1)]);
    }
};
}  // namespace

double dstar_pair(const SnakeGrid& g, std::int64_t u, std::int64_t v) {
    if (u == v) return 0.0;
    const std::int64_t n = g.m + 1;
    RangeMin rm(g.Z);
    auto dc = [&](std::int64_t j, std::int64_t k) {
        if (j > k) std::swap(j, k);
        double inner = rm.query(j, k);
        double outer = std::min(rm.query(k, n - 1), rm.query(0, j));
        return g.Z[static_cast<std::size_t>(j)] + g.Z[static_cast<std::size_t>(k)] -
               2.0 * std::max(inner, outer);
    };
    std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
    std::vector<std::uint8_t> settled(static_cast<std::size_t>(n), 0);
    for (std::int64_t j = 0; j < n; ++j) dist[static_cast<std::size_t>(j)] = dc(u, j);
    settled[static_cast<std::size_t>(u)] = 1;
    for (std::int64_t round = 1; round < n; ++round) {
        std::int64_t best = -1;
        double bd = 0;
        for (std::int64_t j = 0; j < n; ++j)
            if (!settled[static_cast<std::size_t>(j)] &&
                (best < 0 || dist[static_cast<std::size_t>(j)] < bd)) {
                best = j;
                bd = dist[static_cast<std::size_t>(j)];
            }
        if (best < 0) break;
        settled[static_cast<std::size_t>(best)] = 1;
        if (best == v) return bd;
        for (std::int64_t j = 0; j < n; ++j) {
            if (settled[static_cast<std::size_t>(j)]) continue;
            double via = bd + dc(best, j);
            if (via < dist[static_cast<std::size_t>(j)]) dist[static_cast<std::size_t>(j)] = via;
        }
    }
    return dist[static_cast<std::size_t>(v)];
}

std::vector<std::int64_t> simple_geodesic_continuum(const SnakeGrid& g, std::int64_t k) {
    RM_CHECK(k >= 0 && k <= g.m, "index out of range");
    const double zk = g.Z[static_cast<std::size_t>(k)];
    const double total = zk + g.delta;
    std::vector<std::int64_t> path{k};
    if (total <= 0) return path;  // k is the minimum point
    const double h = g.delta / std::ceil(std::max(1.0, g.delta * std::sqrt(static_cast<double>(g.m))));
    // first crossing of each level after k, else before k
    double min_fwd = g.Z[static_cast<std::size_t>(k)];
    for (std::int64_t t = k; t <= g.m; ++t)
        min_fwd = std::min(min_fwd, g.Z[static_cast<std::size_t>(t)]);
    auto first_cross = [&](double level) -> std::int64_t {
        if (min_fwd <= level) {
            for (std::int64_t t = k; t <= g.m; ++t)
                if (g.Z[static_cast<std::size_t>(t)] <= level) return t;
        }
        for (std::int64_t t = 0; t <= k; ++t)
            if (g.Z[static_cast<std::size_t>(t)] <= level) return t;
        RM_CHECK(false, "level below the minimum");
        return -1;
    };
    const auto levels = static_cast<std::int64_t>(std::ceil(total / h));
    for (std::int64_t i = 1; i <= levels; ++i) {
        // the last level is the minimum itself; clamp it exactly
        double level = static_cast<double>(i) * h >= total ? -g.delta
                                                           : zk - static_cast<double>(i) * h;
        std::int64_t t = first_cross(level);
        if (t != path.back()) path.push_back(t);
    }
    if (path.back() != g.s_star) path.push_back(g.s_star);
    return path;
}

// ---- serialization ---------------------------------------------------------

static void fmt_double(std::ostream& os, double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    os.write(buf, res.ptr - buf);
}

void write_snake_csv(std::ostream& os, const SnakeGrid& g) {
    os << "t,e,Z\n";
    for (std::int64_t k = 0; k <= g.m; ++k) {
        fmt_double(os, static_cast<double>(k) / static_cast<double>(g.m));
        os << ',';
        fmt_double(os, g.e[static_cast<std::size_t>(k)]);
        os << ',';
        fmt_double(os, g.Z[static_cast<std::size_t>(k)]);
        os << '\n';
    }
}

static void put_u32s(std::ostream& os, std::uint32_t x) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}
static void put_u64s(std::ostream& os, std::uint64_t x) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}
static void put_f64(std::ostream& os, double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, 8);
    put_u64s(os, u);
}

void write_metric_binary(std::ostream& os, const MetricSample& ms, bool with_dcirc,
                         bool with_dstar) {
    os.write("RMDM", 4);
    put_u32s(os, 1);
    put_u64s(os, static_cast<std::uint64_t>(ms.m));
    std::uint32_t flags = (with_dcirc ? 1u : 0u) | (with_dstar ? 2u : 0u);
    put_u32s(os, flags);
    const std::int64_t n = ms.m + 1;
    auto dump_upper = [&](const std::vector<double>& mat) {
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i; j < n; ++j)
                put_f64(os, mat[static_cast<std::size_t>(i * n + j)]);
    };
    if (with_dcirc) dump_upper(ms.dcirc_mat);
    if (with_dstar) dump_upper(ms.dstar_mat);
}

MetricSample read_metric_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RMDM", 4) != 0) throw Error("RMDM: bad magic");
    auto get_u32 = [&]() {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        if (!is) throw Error("RMDM: truncated");
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return x;
    };
    auto get_u64 = [&]() {
        unsigned char b[8];
        is.read(reinterpret_cast<char*>(b), 8);
        if (!is) throw Error("RMDM: truncated");
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return x;
    };
    if (get_u32() != 1) throw Error("RMDM: unsupported version");
    MetricSample ms;
    ms.m = static_cast<std::int64_t>(get_u64());
    std::uint32_t flags = get_u32();
    const std::int64_t n = ms.m + 1;
    auto load_upper = [&](std::vector<double>& mat) {
        mat.assign(static_cast<std::size_t>(n * n), 0.0);
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i; j < n; ++j) {
                std::uint64_t u = get_u64();
                double x;
                std::memcpy(&x, &u, 8);
                mat[static_cast<std::size_t>(i * n + j)] = x;
                mat[static_cast<std::size_t>(j * n + i)] = x;
            }
    };
    if (flags & 1u) load_upper(ms.dcirc_mat);
    if (flags & 2u) load_upper(ms.dstar_mat);
    return ms;
}

}  // namespace randmaps
