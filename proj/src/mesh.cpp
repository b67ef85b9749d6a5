#include "finsler/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace finsler::mesh {

namespace {

// Euclidean nearest boundary point (scan + golden refinement); used for the
// geometric projection of rim nodes regardless of the anisotropy.
Eigen::Vector2d nearest_euclid(const geom::Domain2D& dom, const Eigen::Vector2d& x) {
    const int n = dom.size();
    double best = 1e300;
    int bi = 0;
    for (int i = 0; i < n; ++i) {
        const double d2 = (x - dom.point(i)).squaredNorm();
        if (d2 < best) {
            best = d2;
            bi = i;
        }
    }
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = -1.5, b = 1.5;
    auto f = [&](double s) { return (x - dom.curve_at(bi, s)).squaredNorm(); };
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return dom.curve_at(bi, 0.5 * (a + b));
}

}  // namespace

void Mesh2D::build_triangles() {
    tris.clear();
    auto try_tri = [&](int va, int vb, int vc) {
        if (!active(va) || !active(vb) || !active(vc)) return;
        TriGeom t;
        t.v[0] = va;
        t.v[1] = vb;
        t.v[2] = vc;
        const double ax = px[va], ay = py[va];
        const double bx = px[vb], by = py[vb];
        const double cx = px[vc], cy = py[vc];
        const double area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
        // drop slivers collapsed by the rim projection
        if (area2 <= 1e-3 * h * h) return;
        t.area = 0.5 * area2;
        t.gx[0] = (by - cy) / area2;
        t.gy[0] = (cx - bx) / area2;
        t.gx[1] = (cy - ay) / area2;
        t.gy[1] = (ax - cx) / area2;
        t.gx[2] = (ay - by) / area2;
        t.gy[2] = (bx - ax) / area2;
        tris.push_back(t);
    };
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int v00 = node(i, j), v10 = node(i + 1, j);
            const int v01 = node(i, j + 1), v11 = node(i + 1, j + 1);
            try_tri(v00, v10, v01);
            try_tri(v10, v11, v01);
        }
    }
}

void Mesh2D::finalize() {
    lump.assign(n_nodes(), 0.0);
    for (const auto& t : tris)
        for (int l = 0; l < 3; ++l) lump[t.v[l]] += t.area / 3.0;

    unknown_of.assign(n_nodes(), -1);
    node_of.clear();
    for (int v = 0; v < n_nodes(); ++v) {
        if (cls[v] == NodeClass::Interior && lump[v] > 0.0) {
            unknown_of[v] = static_cast<int>(node_of.size());
            node_of.push_back(v);
        }
    }

    adj_ptr.assign(n_nodes() + 1, 0);
    for (const auto& t : tris)
        for (int l = 0; l < 3; ++l) ++adj_ptr[t.v[l] + 1];
    for (int v = 0; v < n_nodes(); ++v) adj_ptr[v + 1] += adj_ptr[v];
    adj_tri.assign(tris.size() * 3, 0);
    adj_loc.assign(tris.size() * 3, 0);
    std::vector<int> fill(adj_ptr.begin(), adj_ptr.end() - 1);
    for (int ti = 0; ti < static_cast<int>(tris.size()); ++ti) {
        for (int l = 0; l < 3; ++l) {
            const int v = tris[ti].v[l];
            adj_tri[fill[v]] = ti;
            adj_loc[fill[v]] = l;
            ++fill[v];
        }
    }
}

Mesh2D Mesh2D::rectangle(double ax, double ay, double bx, double by, double hh) {
    Mesh2D m;
    m.h = hh;
    m.x0 = ax;
    m.y0 = ay;
    m.nx = static_cast<int>(std::lround((bx - ax) / hh)) + 1;
    m.ny = static_cast<int>(std::lround((by - ay) / hh)) + 1;
    m.domain_extent = std::max(bx - ax, by - ay);
    const int n = m.n_nodes();
    m.cls.assign(n, NodeClass::Interior);
    m.px.resize(n);
    m.py.resize(n);
    m.delta.assign(n, -1.0);
    for (int j = 0; j < m.ny; ++j) {
        for (int i = 0; i < m.nx; ++i) {
            const int v = m.node(i, j);
            m.px[v] = ax + i * hh;
            m.py[v] = ay + j * hh;
            if (i == 0 || j == 0 || i == m.nx - 1 || j == m.ny - 1)
                m.cls[v] = NodeClass::Dirichlet;
        }
    }
    m.build_triangles();
    m.finalize();
    return m;
}

Mesh2D Mesh2D::from_domain(const geom::AnisotropicDistanceField& field, double hh) {
    const auto& dom = field.domain();
    Mesh2D m;
    m.h = hh;
    const Eigen::Vector2d lo = dom.bbox_lo() - Eigen::Vector2d(hh, hh);
    const Eigen::Vector2d hi = dom.bbox_hi() + Eigen::Vector2d(hh, hh);
    m.x0 = lo.x();
    m.y0 = lo.y();
    m.nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / hh)) + 1;
    m.ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / hh)) + 1;
    m.domain_extent =
        std::max(dom.bbox_hi().x() - dom.bbox_lo().x(), dom.bbox_hi().y() - dom.bbox_lo().y());
    const int n = m.n_nodes();
    m.cls.assign(n, NodeClass::Outside);
    m.px.resize(n);
    m.py.resize(n);
    m.delta.assign(n, -1.0);

    std::vector<char> inside(n, 0);
    for (int j = 0; j < m.ny; ++j) {
        for (int i = 0; i < m.nx; ++i) {
            const int v = m.node(i, j);
            m.px[v] = m.x0 + i * hh;
            m.py[v] = m.y0 + j * hh;
            inside[v] = dom.contains({m.px[v], m.py[v]}) ? 1 : 0;
        }
    }
    for (int j = 0; j < m.ny; ++j) {
        for (int i = 0; i < m.nx; ++i) {
            const int v = m.node(i, j);
            if (!inside[v]) continue;
            const bool rim = (i == 0 || inside[m.node(i - 1, j)] == 0) ||
                             (i == m.nx - 1 || inside[m.node(i + 1, j)] == 0) ||
                             (j == 0 || inside[m.node(i, j - 1)] == 0) ||
                             (j == m.ny - 1 || inside[m.node(i, j + 1)] == 0);
            m.cls[v] = rim ? NodeClass::Dirichlet : NodeClass::Interior;
        }
    }

    // distances for interior nodes, geometric projection for rim nodes
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (int v = 0; v < n; ++v) {
        if (m.cls[v] == NodeClass::Interior) {
            m.delta[v] = field.nearest_boundary({m.px[v], m.py[v]}).distance;
        } else if (m.cls[v] == NodeClass::Dirichlet) {
            const Eigen::Vector2d z = nearest_euclid(dom, {m.px[v], m.py[v]});
            m.px[v] = z.x();
            m.py[v] = z.y();
            m.delta[v] = 0.0;
        }
    }
    m.build_triangles();
    m.finalize();
    return m;
}

Mesh2D Mesh2D::from_domain_shrunk(const geom::AnisotropicDistanceField& field, double hh,
                                  double margin) {
    const auto& dom = field.domain();
    Mesh2D m = from_domain(field, hh);
    // reclassify: active iff delta >= margin; new rim projected onto the
    // level set along the ray to the nearest boundary point
    const int n = m.n_nodes();
    std::vector<char> act(n, 0);
    for (int v = 0; v < n; ++v)
        act[v] = (m.cls[v] == NodeClass::Interior && m.delta[v] >= margin) ? 1 : 0;
    for (int j = 0; j < m.ny; ++j) {
        for (int i = 0; i < m.nx; ++i) {
            const int v = m.node(i, j);
            m.px[v] = m.x0 + i * hh;
            m.py[v] = m.y0 + j * hh;
            if (!act[v]) {
                m.cls[v] = NodeClass::Outside;
                continue;
            }
            const bool rim = (i == 0 || !act[m.node(i - 1, j)]) ||
                             (i == m.nx - 1 || !act[m.node(i + 1, j)]) ||
                             (j == 0 || !act[m.node(i, j - 1)]) ||
                             (j == m.ny - 1 || !act[m.node(i, j + 1)]);
            m.cls[v] = rim ? NodeClass::Dirichlet : NodeClass::Interior;
        }
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (int v = 0; v < n; ++v) {
        if (m.cls[v] != NodeClass::Dirichlet) continue;
        const Eigen::Vector2d x(m.px[v], m.py[v]);
        const auto np = field.nearest_boundary(x);
        const Eigen::Vector2d proj = np.z + (x - np.z) * (margin / std::max(np.distance, 1e-300));
        m.px[v] = proj.x();
        m.py[v] = proj.y();
        m.delta[v] = margin;
    }
    (void)dom;
    m.build_triangles();
    m.finalize();
    return m;
}

}  // namespace finsler::mesh
