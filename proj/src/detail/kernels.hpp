#pragma once

// Inner loops shared by the cell solver and the scheme tests. Not installed.

#include <span>
#include <vector>

#include "phom/cell_solver.hpp"

namespace phom::detail {

/// Largest |offset component| any stencil may use.
inline constexpr int kMaxReach = 2;

/// Copy of a periodic field with kMaxReach ghost layers so the stencil loops
/// run without index wrapping.
class PaddedField {
public:
    explicit PaddedField(int n);
    void fill(std::span<const double> u);

    int n() const { return n_; }
    int stride() const { return stride_; }
    /// Pointer to interior point (0, j); valid for offsets within kMaxReach.
    const double *row(int j) const { return data_.data() + (j + kMaxReach) * stride_ + kMaxReach; }

private:
    int n_;
    int stride_;
    std::vector<double> data_;
};

struct Workspace {
    std::vector<double> alt;  // monotone values when filtering
};

/// out[k] = F(Q + D_h^2 u, y_k) for the scheme; `pad` holds u.
void evaluate(const CellOperator &op, const SchemeSpec &scheme, const Sym2 &q,
              const PaddedField &pad, std::span<double> out, Workspace &ws);

}  // namespace phom::detail
