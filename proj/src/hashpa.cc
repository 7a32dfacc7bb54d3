#include "bqs/hashpa.h"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace bqs {

HashSeed::HashSeed(std::size_t n, std::size_t ell, BitString matrix)
    : n_(n), ell_(ell), matrix_(std::move(matrix)) {
    if (n == 0 || ell == 0) {
        throw std::invalid_argument("HashSeed: n and ell must be positive");
    }
    if (matrix_.size() != n * ell) {
        throw std::invalid_argument("HashSeed: matrix has " + std::to_string(matrix_.size()) +
                                    " bits, expected " + std::to_string(n * ell));
    }
}

HashSeed sample_hash_seed(std::size_t n, std::size_t ell, Rng &rng) {
    if (ell < 1 || ell > n) {
        throw std::invalid_argument("sample_hash_seed: need 1 <= ell <= n");
    }
    return HashSeed(n, ell, BitString::random(n * ell, rng));
}

BitString hash(const HashSeed &seed, const BitString &x) {
    if (x.size() != seed.input_bits()) {
        throw std::invalid_argument("hash: input has " + std::to_string(x.size()) + " bits, seed expects " +
                                    std::to_string(seed.input_bits()));
    }
    BitString y(seed.output_bits());
    for (std::size_t r = 0; r < seed.output_bits(); ++r) {
        int acc = 0;
        for (std::size_t c = 0; c < seed.input_bits(); ++c) {
            acc ^= seed.at(r, c) & x[c];
        }
        y.set(r, acc);
    }
    return y;
}

std::uint64_t count_colliding_seeds(std::size_t n, std::size_t ell, const BitString &x0,
                                    const BitString &x1) {
    if (n * ell > 30) {
        throw std::invalid_argument("count_colliding_seeds: too many seeds to enumerate");
    }
    std::uint64_t seeds = std::uint64_t{1} << (n * ell);
    std::uint64_t collisions = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
        HashSeed seed(n, ell, BitString::from_uint(s, n * ell));
        if (hash(seed, x0) == hash(seed, x1)) {
            ++collisions;
        }
    }
    return collisions;
}

double linear_family_collision_probability(std::size_t ell) {
    return std::ldexp(1.0, -static_cast<int>(ell));
}

double collision_probability(std::size_t n, std::size_t ell, const BitString &x0, const BitString &x1) {
    if (x0.size() != n || x1.size() != n) {
        throw std::invalid_argument("collision_probability: inputs must have n bits");
    }
    if (x0 == x1) {
        throw std::invalid_argument("collision_probability: inputs must differ");
    }
    if (ell < 1 || ell > n) {
        throw std::invalid_argument("collision_probability: need 1 <= ell <= n");
    }
    if (n * ell <= 24) {
        auto hits = count_colliding_seeds(n, ell, x0, x1);
        return std::ldexp(static_cast<double>(hits), -static_cast<int>(n * ell));
    }
    return linear_family_collision_probability(ell);
}

std::int64_t pa_extractable_length(double h_min, std::int64_t q, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("pa_extractable_length: eps must lie in (0, 1)");
    }
    if (q < 0) {
        throw std::invalid_argument("pa_extractable_length: q must be non-negative");
    }
    double bound = h_min - static_cast<double>(q) - 2.0 * std::log2(1.0 / eps);
    double ell = std::floor(bound);
    return ell < 0 ? 0 : static_cast<std::int64_t>(ell);
}

std::uint64_t apply_rows(const std::vector<std::uint64_t> &rows, std::uint64_t x) {
    std::uint64_t y = 0;
    for (auto row : rows) {
        y = (y << 1) | static_cast<std::uint64_t>(std::popcount(row & x) & 1);
    }
    return y;
}

namespace {

// Number of ell x r matrices of rank r: prod_{i<r} (2^ell - 2^i).
std::uint64_t full_rank_count(std::size_t ell, std::size_t r) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < r; ++i) {
        count *= (std::uint64_t{1} << ell) - (std::uint64_t{1} << i);
    }
    return count;
}

void enumerate_pivots(std::size_t n, std::size_t r, std::size_t start, std::vector<std::size_t> &pivots,
                      const std::function<void(const std::vector<std::size_t> &)> &visit) {
    if (pivots.size() == r) {
        visit(pivots);
        return;
    }
    for (std::size_t c = start; c < n; ++c) {
        pivots.push_back(c);
        enumerate_pivots(n, r, c + 1, pivots, visit);
        pivots.pop_back();
    }
}

}  // namespace

std::vector<RowSpaceClass> enumerate_row_spaces(std::size_t n, std::size_t ell) {
    if (n == 0 || n > 62) {
        throw std::invalid_argument("enumerate_row_spaces: need 1 <= n <= 62");
    }
    std::vector<RowSpaceClass> classes;
    std::size_t max_rank = std::min(n, ell);
    auto bit = [n](std::size_t col) { return std::uint64_t{1} << (n - 1 - col); };
    for (std::size_t r = 0; r <= max_rank; ++r) {
        std::uint64_t multiplicity = full_rank_count(ell, r);
        std::vector<std::size_t> pivots;
        enumerate_pivots(n, r, 0, pivots, [&](const std::vector<std::size_t> &piv) {
            // Free cells of a reduced row echelon form: in row i, columns after
            // pivot i that are not pivots themselves.
            std::vector<std::pair<std::size_t, std::size_t>> free_cells;
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t c = piv[i] + 1; c < n; ++c) {
                    bool is_pivot = false;
                    for (auto p : piv) {
                        is_pivot |= p == c;
                    }
                    if (!is_pivot) {
                        free_cells.emplace_back(i, c);
                    }
                }
            }
            std::uint64_t fillings = std::uint64_t{1} << free_cells.size();
            for (std::uint64_t f = 0; f < fillings; ++f) {
                std::vector<std::uint64_t> rows(r, 0);
                for (std::size_t i = 0; i < r; ++i) {
                    rows[i] = bit(piv[i]);
                }
                for (std::size_t k = 0; k < free_cells.size(); ++k) {
                    if ((f >> k) & 1u) {
                        rows[free_cells[k].first] |= bit(free_cells[k].second);
                    }
                }
                classes.push_back({std::move(rows), multiplicity});
            }
        });
    }
    return classes;
}

namespace {

void check_pa_shape(std::size_t rows, std::size_t n, std::size_t ell) {
    if (n == 0 || n > 16) {
        throw std::invalid_argument("pa_distance: need 1 <= n <= 16");
    }
    if (rows != (std::size_t{1} << n)) {
        throw std::invalid_argument("pa_distance: table must have 2^n rows");
    }
    if (ell > n) {
        throw std::invalid_argument("pa_distance: need ell <= n");
    }
}

// Sums per-class distances weighted by multiplicity / 2^(n ell).
template <class PerClass>
double average_over_row_spaces(std::size_t n, std::size_t ell, PerClass per_class) {
    double total = 0;
    for (const auto &cls : enumerate_row_spaces(n, ell)) {
        double weight = std::ldexp(static_cast<double>(cls.multiplicity), -static_cast<int>(n * ell));
        total += weight * per_class(cls.basis_rows);
    }
    return total;
}

}  // namespace

double pa_distance(const std::vector<std::vector<double>> &pxz, std::size_t n, std::size_t ell) {
    check_pa_shape(pxz.size(), n, ell);
    if (ell == 0) {
        return 0;
    }
    std::size_t nz = pxz[0].size();
    std::vector<double> pz(nz, 0.0);
    for (const auto &row : pxz) {
        if (row.size() != nz) {
            throw std::invalid_argument("pa_distance: ragged table");
        }
        for (std::size_t z = 0; z < nz; ++z) {
            pz[z] += row[z];
        }
    }
    double u = std::ldexp(1.0, -static_cast<int>(ell));
    double total_mass = 0;
    for (auto p : pz) {
        total_mass += p;
    }
    return average_over_row_spaces(n, ell, [&](const std::vector<std::uint64_t> &rows) {
        // Seeds in this class are A R with A injective, so their outputs are
        // the r-bit values R x placed on a 2^r-element subset of {0,1}^ell.
        std::size_t r = rows.size();
        std::vector<double> mass((std::size_t{1} << r) * nz, 0.0);
        for (std::uint64_t x = 0; x < pxz.size(); ++x) {
            auto y = apply_rows(rows, x);
            for (std::size_t z = 0; z < nz; ++z) {
                mass[y * nz + z] += pxz[x][z];
            }
        }
        double d = 0;
        for (std::size_t y = 0; y < (std::size_t{1} << r); ++y) {
            for (std::size_t z = 0; z < nz; ++z) {
                d += std::abs(mass[y * nz + z] - u * pz[z]);
            }
        }
        // outputs outside the image carry only the uniform side
        d += (1.0 - std::ldexp(1.0, static_cast<int>(r) - static_cast<int>(ell))) * total_mass;
        return d / 2;
    });
}

double pa_distance_quantum(const std::vector<std::vector<Operator>> &weighted, std::size_t n,
                           std::size_t ell) {
    check_pa_shape(weighted.size(), n, ell);
    if (ell == 0) {
        return 0;
    }
    std::size_t nz = weighted[0].size();
    auto dim = weighted[0][0].rows();
    std::vector<Operator> rho_z(nz, Operator::Zero(dim, dim));
    for (const auto &row : weighted) {
        if (row.size() != nz) {
            throw std::invalid_argument("pa_distance_quantum: ragged table");
        }
        for (std::size_t z = 0; z < nz; ++z) {
            if (row[z].rows() != dim || row[z].cols() != dim) {
                throw std::invalid_argument("pa_distance_quantum: side-information dimensions differ");
            }
            rho_z[z] += row[z];
        }
    }
    double u = std::ldexp(1.0, -static_cast<int>(ell));
    double trace_all = 0;
    for (const auto &m : rho_z) {
        trace_all += m.trace().real();
    }
    return average_over_row_spaces(n, ell, [&](const std::vector<std::uint64_t> &rows) {
        std::size_t r = rows.size();
        std::vector<Operator> sigma((std::size_t{1} << r) * nz, Operator::Zero(dim, dim));
        for (std::uint64_t x = 0; x < weighted.size(); ++x) {
            auto y = apply_rows(rows, x);
            for (std::size_t z = 0; z < nz; ++z) {
                sigma[y * nz + z] += weighted[x][z];
            }
        }
        double d = 0;
        for (std::size_t y = 0; y < (std::size_t{1} << r); ++y) {
            for (std::size_t z = 0; z < nz; ++z) {
                d += half_trace_norm(sigma[y * nz + z] - u * rho_z[z]);
            }
        }
        d += (1.0 - std::ldexp(1.0, static_cast<int>(r) - static_cast<int>(ell))) * trace_all / 2;
        return d;
    });
}

}  // namespace bqs
