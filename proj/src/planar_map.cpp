#include "randmaps/planar_map.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <queue>

namespace randmaps {

void PlanarMap::set_rotations(const std::vector<std::vector<std::uint32_t>>& rot) {
    sigma.assign(alpha.size(), 0);
    vertex_half.assign(rot.size(), UINT32_MAX);
    vertex_of.assign(alpha.size(), 0);
    for (std::size_t v = 0; v < rot.size(); ++v) {
        const auto& r = rot[v];
        RM_CHECK(!r.empty(), "isolated vertex in rotation system");
        vertex_half[v] = r[0];
        for (std::size_t i = 0; i < r.size(); ++i) {
            sigma[r[i]] = r[(i + 1) % r.size()];
            vertex_of[r[i]] = static_cast<std::uint32_t>(v);
        }
    }
}

void PlanarMap::validate() const {
    const auto H = static_cast<std::uint32_t>(half_count());
    RM_CHECK(H % 2 == 0, "odd half-edge count");
    std::vector<std::uint8_t> seen(H, 0);
    for (std::uint32_t h = 0; h < H; ++h) {
        RM_CHECK(alpha[h] < H && alpha[h] != h && alpha[alpha[h]] == h,
                 "alpha is not a fixed-point-free involution");
        RM_CHECK(sigma[h] < H, "sigma out of range");
        seen[sigma[h]]++;
    }
    for (std::uint32_t h = 0; h < H; ++h) RM_CHECK(seen[h] == 1, "sigma is not a permutation");
    for (std::uint32_t h = 0; h < H; ++h)
        RM_CHECK(vertex_of[sigma[h]] == vertex_of[h], "sigma crosses vertices");
    // connectivity over half-edges
    std::vector<std::uint8_t> vis(H, 0);
    std::vector<std::uint32_t> stack{root_half};
    vis[root_half] = 1;
    std::int64_t cnt = 0;
    while (!stack.empty()) {
        std::uint32_t h = stack.back();
        stack.pop_back();
        ++cnt;
        for (std::uint32_t g : {alpha[h], sigma[h]})
            if (!vis[g]) {
                vis[g] = 1;
                stack.push_back(g);
            }
    }
    RM_CHECK(cnt == H, "map is not connected");
    RM_CHECK(pointed < vertex_count(), "pointed vertex out of range");
}

std::vector<PlanarMap::Face> PlanarMap::faces() const {
    const auto H = static_cast<std::uint32_t>(half_count());
    std::vector<std::uint8_t> vis(H, 0);
    std::vector<Face> out;
    for (std::uint32_t h0 = 0; h0 < H; ++h0) {
        if (vis[h0]) continue;
        Face f;
        std::uint32_t h = h0;
        do {
            vis[h] = 1;
            f.halves.push_back(h);
            h = sigma[alpha[h]];
        } while (h != h0);
        f.degree = static_cast<std::int64_t>(f.halves.size());
        out.push_back(std::move(f));
    }
    return out;
}

std::int64_t PlanarMap::face_count() const {
    const auto H = static_cast<std::uint32_t>(half_count());
    std::vector<std::uint8_t> vis(H, 0);
    std::int64_t faces = 0;
    for (std::uint32_t h0 = 0; h0 < H; ++h0) {
        if (vis[h0]) continue;
        ++faces;
        std::uint32_t h = h0;
        do {
            vis[h] = 1;
            h = sigma[alpha[h]];
        } while (h != h0);
    }
    return faces;
}

std::int64_t PlanarMap::euler_characteristic() const {
    return vertex_count() - edge_count() + face_count();
}

std::vector<std::int32_t> PlanarMap::degrees() const {
    std::vector<std::int32_t> deg(vertex_count(), 0);
    for (std::uint32_t h = 0; h < half_count(); ++h) deg[vertex_of[h]]++;
    return deg;
}

std::vector<std::int32_t> PlanarMap::canonical_code(std::uint32_t from_half) const {
    // Breadth-first over half-edges: each newly discovered vertex scans its
    // rotation starting at the entry half, recording discovered endpoint ids.
    const auto V = vertex_count();
    std::vector<std::int32_t> id(V, -1);
    std::vector<std::int32_t> code;
    code.reserve(half_count() + 2);
    std::queue<std::uint32_t> q;  // entry halves of discovered vertices
    std::int32_t next = 0;
    id[vertex_of[from_half]] = next++;
    q.push(from_half);
    while (!q.empty()) {
        std::uint32_t h0 = q.front();
        q.pop();
        std::uint32_t h = h0;
        do {
            std::uint32_t w = vertex_of[alpha[h]];
            if (id[w] < 0) {
                id[w] = next++;
                q.push(alpha[h]);
            }
            code.push_back(id[w]);
            h = sigma[h];
        } while (h != h0);
        code.push_back(-1);  // vertex separator
    }
    code.push_back(id[pointed]);
    return code;
}

DistanceField bfs_distances(const PlanarMap& map, std::uint32_t source) {
    DistanceField out;
    out.source = source;
    out.d.assign(map.vertex_count(), -1);
    std::vector<std::uint32_t> cur{source}, nxt;
    out.d[source] = 0;
    std::int32_t dist = 0;
    while (!cur.empty()) {
        ++dist;
        nxt.clear();
        for (std::uint32_t v : cur) {
            std::uint32_t h0 = map.vertex_half[v];
            std::uint32_t h = h0;
            do {
                std::uint32_t w = map.vertex_of[map.alpha[h]];
                if (out.d[w] < 0) {
                    out.d[w] = dist;
                    nxt.push_back(w);
                }
                h = map.sigma[h];
            } while (h != h0);
        }
        cur.swap(nxt);
    }
    return out;
}

bool certify_geodesic(const PlanarMap& map, const GeodesicPath& path) {
    if (path.vertices.empty()) return false;
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
        std::uint32_t v = path.vertices[i], w = path.vertices[i + 1];
        bool adjacent = false;
        std::uint32_t h0 = map.vertex_half[v];
        std::uint32_t h = h0;
        do {
            if (map.vertex_of[map.alpha[h]] == w) {
                adjacent = true;
                break;
            }
            h = map.sigma[h];
        } while (h != h0);
        if (!adjacent) return false;
    }
    DistanceField df = bfs_distances(map, path.vertices.front());
    return df.d[path.vertices.back()] == path.length();
}

void write_map_text(std::ostream& os, const PlanarMap& map, std::int64_t p, std::int64_t n) {
    os << map.vertex_count() << ' ' << map.edge_count() << ' ' << map.face_count() << ' '
       << p << ' ' << n << '\n';
    for (std::uint32_t h = 0; h < map.half_count(); h += 0) {
        // one line per edge: emit for the smaller half id of each pair
        if (h < map.alpha[h])
            os << map.vertex_of[h] << ' ' << map.vertex_of[map.alpha[h]] << '\n';
        ++h;
    }
    os << "root " << map.vertex_of[map.root_half] << ' '
       << map.vertex_of[map.alpha[map.root_half]] << '\n';
    os << "point " << map.pointed << '\n';
}

static void put_u32(std::ostream& os, std::uint32_t x) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}
static std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw Error("RMPM: truncated input");
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return x;
}

void write_map_binary(std::ostream& os, const PlanarMap& map) {
    os.write("RMPM", 4);
    put_u32(os, 1);  // version
    put_u32(os, static_cast<std::uint32_t>(map.half_count()));
    put_u32(os, static_cast<std::uint32_t>(map.vertex_count()));
    put_u32(os, map.root_half);
    put_u32(os, map.pointed);
    for (auto x : map.alpha) put_u32(os, x);
    for (auto x : map.sigma) put_u32(os, x);
    for (auto x : map.vertex_of) put_u32(os, x);
}

PlanarMap read_map_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RMPM", 4) != 0) throw Error("RMPM: bad magic");
    std::uint32_t version = get_u32(is);
    if (version != 1) throw Error("RMPM: unsupported version");
    std::uint32_t H = get_u32(is);
    std::uint32_t V = get_u32(is);
    PlanarMap map;
    map.root_half = get_u32(is);
    map.pointed = get_u32(is);
    map.alpha.resize(H);
    map.sigma.resize(H);
    map.vertex_of.resize(H);
    for (auto& x : map.alpha) x = get_u32(is);
    for (auto& x : map.sigma) x = get_u32(is);
    for (auto& x : map.vertex_of) x = get_u32(is);
    map.vertex_half.assign(V, UINT32_MAX);
    for (std::uint32_t h = 0; h < H; ++h)
        if (map.vertex_half[map.vertex_of[h]] == UINT32_MAX) map.vertex_half[map.vertex_of[h]] = h;
    map.vertex_origin.assign(V, 0);
    map.validate();
    return map;
}

}  // namespace randmaps
