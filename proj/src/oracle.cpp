#include "aniso/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "aniso/parallel.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

constexpr std::int64_t kBatch = 1 << 16;

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// counter-based: every (seed, sample, slot) triple maps to one uniform
inline double uniform01(std::uint64_t seed, std::uint64_t sample, std::uint64_t slot) {
    const std::uint64_t bits = mix64(mix64(seed ^ mix64(sample)) ^ (0xd1342543de82ef95ULL * (slot + 1)));
    return (bits >> 11) * 0x1.0p-53;
}

// standard normals via Box-Muller pairs
void sample_normals(std::uint64_t seed, std::uint64_t sample, int n, double* g) {
    for (int k = 0; 2 * k < n; ++k) {
        const double u1 = 1.0 - uniform01(seed, sample, 2 * k);      // (0,1]
        const double u2 = uniform01(seed, sample, 2 * k + 1);        // [0,1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        g[2 * k] = r * std::cos(2.0 * M_PI * u2);
        if (2 * k + 1 < n) g[2 * k + 1] = r * std::sin(2.0 * M_PI * u2);
    }
}

}  // namespace

McEstimate mc_mass(const SpdMatrix& a, const SetRegion& e, std::int64_t n, std::uint64_t seed) {
    if (a.dim() != e.dim()) throw DimensionMismatch("mc_mass: dimension mismatch");
    if (n < 1) throw OutOfRange("mc_mass needs n >= 1");
    const int dim = a.dim();
    const std::int64_t batches = (n + kBatch - 1) / kBatch;
    std::vector<std::int64_t> hits(batches, 0);

    parallel_for(static_cast<int>(batches), [&](int bi) {
        const std::int64_t from = static_cast<std::int64_t>(bi) * kBatch;
        const std::int64_t to = std::min(n, from + kBatch);
        const std::uint64_t sub = mix64(seed ^ mix64(static_cast<std::uint64_t>(bi)));
        std::vector<double> g(dim);
        Vector x(dim);
        std::int64_t h = 0;
        for (std::int64_t i = from; i < to; ++i) {
            sample_normals(sub, static_cast<std::uint64_t>(i - from), dim, g.data());
            for (int r = 0; r < dim; ++r) {
                double s = 0;
                for (int c = 0; c < dim; ++c) s += a.sqrt_inv_entries()(r, c) * g[c];
                x[r] = s;
            }
            if (contains(e, x)) ++h;
        }
        hits[bi] = h;
    });

    std::int64_t total = 0;
    for (std::int64_t h : hits) total += h;
    const double p = static_cast<double>(total) / static_cast<double>(n);
    McEstimate out;
    out.value = p;
    out.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
    out.n_samples = n;
    out.seed = seed;
    return out;
}

std::vector<McEstimate> mc_barycenter(const SpdMatrix& a, const SetRegion& e, std::int64_t n,
                                      std::uint64_t seed) {
    if (a.dim() != e.dim()) throw DimensionMismatch("mc_barycenter: dimension mismatch");
    if (n < 1) throw OutOfRange("mc_barycenter needs n >= 1");
    const int dim = a.dim();
    const std::int64_t batches = (n + kBatch - 1) / kBatch;
    std::vector<std::vector<double>> sums(batches), sqs(batches);

    parallel_for(static_cast<int>(batches), [&](int bi) {
        const std::int64_t from = static_cast<std::int64_t>(bi) * kBatch;
        const std::int64_t to = std::min(n, from + kBatch);
        const std::uint64_t sub = mix64(seed ^ mix64(static_cast<std::uint64_t>(bi)));
        std::vector<double> g(dim), sum(dim, 0.0), sq(dim, 0.0);
        Vector x(dim);
        for (std::int64_t i = from; i < to; ++i) {
            sample_normals(sub, static_cast<std::uint64_t>(i - from), dim, g.data());
            for (int r = 0; r < dim; ++r) {
                double s = 0;
                for (int c = 0; c < dim; ++c) s += a.sqrt_inv_entries()(r, c) * g[c];
                x[r] = s;
            }
            if (contains(e, x)) {
                for (int r = 0; r < dim; ++r) {
                    sum[r] += x[r];
                    sq[r] += x[r] * x[r];
                }
            }
        }
        sums[bi] = std::move(sum);
        sqs[bi] = std::move(sq);
    });

    std::vector<McEstimate> out(dim);
    for (int r = 0; r < dim; ++r) {
        double s = 0, q = 0;
        for (std::int64_t bi = 0; bi < batches; ++bi) {
            s += sums[bi][r];
            q += sqs[bi][r];
        }
        const double mean = s / static_cast<double>(n);
        const double var = std::max(q / static_cast<double>(n) - mean * mean, 0.0);
        out[r].value = mean;
        out[r].std_error = std::sqrt(var / static_cast<double>(n));
        out[r].n_samples = n;
        out[r].seed = seed;
    }
    return out;
}

double grid_perimeter_2d(const SpdMatrix& a, const SetRegion& e, int resolution) {
    if (a.dim() != 2 || e.dim() != 2) throw UnsupportedDimension("grid_perimeter_2d expects n = 2");
    if (resolution < 64) throw ResolutionTooLow("grid_perimeter_2d needs resolution >= 64");

    const double radius = truncation_radius(a.sqrt_inv_norm(), 2, 1e-12);
    const double h = 2.0 * radius / (resolution - 1);
    auto coord = [&](int k) { return -radius + h * k; };

    std::vector<std::uint8_t> inside(static_cast<size_t>(resolution) * resolution);
    parallel_for(resolution, [&](int j) {
        Vector x(2);
        x[1] = coord(j);
        for (int i = 0; i < resolution; ++i) {
            x[0] = coord(i);
            inside[static_cast<size_t>(j) * resolution + i] = contains(e, x) ? 1 : 0;
        }
    });

    // marching squares with midpoint crossings; edges B=0 R=1 T=2 L=3
    static const int kSegments[16][5] = {
        {0, -1, -1, -1, -1}, {1, 0, 3, -1, -1}, {1, 0, 1, -1, -1}, {1, 3, 1, -1, -1},
        {1, 1, 2, -1, -1},   {2, 0, 3, 1, 2},   {1, 0, 2, -1, -1}, {1, 3, 2, -1, -1},
        {1, 2, 3, -1, -1},   {1, 0, 2, -1, -1}, {2, 0, 1, 2, 3},   {1, 1, 2, -1, -1},
        {1, 3, 1, -1, -1},   {1, 0, 1, -1, -1}, {1, 0, 3, -1, -1}, {0, -1, -1, -1, -1}};

    std::vector<double> row_sum(resolution - 1, 0.0);
    parallel_for(resolution - 1, [&](int j) {
        double acc = 0.0;
        for (int i = 0; i + 1 < resolution; ++i) {
            const int b0 = inside[static_cast<size_t>(j) * resolution + i];
            const int b1 = inside[static_cast<size_t>(j) * resolution + i + 1];
            const int b2 = inside[static_cast<size_t>(j + 1) * resolution + i + 1];
            const int b3 = inside[static_cast<size_t>(j + 1) * resolution + i];
            const int code = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
            const int nseg = kSegments[code][0];
            for (int s = 0; s < nseg; ++s) {
                const int e0 = kSegments[code][1 + 2 * s];
                const int e1 = kSegments[code][2 + 2 * s];
                // midpoint crossings carry an angle-dependent length bias
                // that never converges; bisect the membership change along
                // the lattice edge instead
                auto edge_cross = [&](int edge, double& px, double& py) {
                    double ax, ay, bx, by;
                    bool ain;
                    switch (edge) {
                        case 0:
                            ax = coord(i); ay = coord(j); bx = coord(i + 1); by = coord(j);
                            ain = b0;
                            break;
                        case 1:
                            ax = coord(i + 1); ay = coord(j); bx = coord(i + 1); by = coord(j + 1);
                            ain = b1;
                            break;
                        case 2:
                            ax = coord(i); ay = coord(j + 1); bx = coord(i + 1); by = coord(j + 1);
                            ain = b3;
                            break;
                        default:
                            ax = coord(i); ay = coord(j); bx = coord(i); by = coord(j + 1);
                            ain = b0;
                            break;
                    }
                    Vector probe(2);
                    for (int it = 0; it < 30; ++it) {
                        probe[0] = 0.5 * (ax + bx);
                        probe[1] = 0.5 * (ay + by);
                        const bool mid_in = contains(e, probe);
                        if (mid_in == ain) {
                            ax = probe[0];
                            ay = probe[1];
                        } else {
                            bx = probe[0];
                            by = probe[1];
                        }
                    }
                    px = 0.5 * (ax + bx);
                    py = 0.5 * (ay + by);
                };
                double x0, y0, x1, y1;
                edge_cross(e0, x0, y0);
                edge_cross(e1, x1, y1);
                const double len = std::hypot(x1 - x0, y1 - y0);
                Vector mid{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
                const double q = dot(a.apply(mid), mid);
                acc += len * std::exp(-0.5 * q);
            }
        }
        row_sum[j] = acc;
    });

    double total = 0.0;
    for (double s : row_sum) total += s;
    return total * a.sqrt_det() / std::sqrt(2.0 * M_PI);
}

}  // namespace aniso
