#pragma once

// Grid-interpolated kernel sums in the plane:
//
//   phi(i) = sum_j K(|y_i - y_j|^2) q(j)
//
// Each point's charge is spread onto the nodes of a uniform grid with
// Lagrange weights, the node-to-node kernel matrix (Toeplitz in both axes) is
// applied as a circular convolution through real 2-D FFTs, and potentials are
// interpolated back with the same weights.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "htsne/types.hpp"

namespace htsne::detail {

/// Square grid of `boxes` x `boxes` boxes starting at (origin, origin), each
/// holding `nodes_per_box` equispaced interpolation nodes per axis.
struct GridLayout {
  double origin = 0.0;
  double box_width = 1.0;
  int boxes = 1;
  int nodes_per_box = 3;

  int nodes() const noexcept { return boxes * nodes_per_box; }
  double spacing() const noexcept { return box_width / nodes_per_box; }
  /// Coordinate of node g along either axis.
  double node(int g) const noexcept { return origin + (g + 0.5) * spacing(); }
  /// Side of the zero-padded FFT array.
  int fft_size() const noexcept { return 2 * nodes(); }
};

/// Smallest integer >= n whose prime factors are all in {2, 3, 5, 7}.
int next_smooth(int n);

struct FftBuffers;

/// Spectrum of a zero-padded grid array (r2c layout, L x (L/2 + 1)).
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::size_t size);
  std::complex<double>* data() noexcept { return values_.get(); }
  const std::complex<double>* data() const noexcept { return values_.get(); }
  std::size_t size() const noexcept { return size_; }

 private:
  struct Free {
    void operator()(std::complex<double>* p) const noexcept;
  };
  std::unique_ptr<std::complex<double>[], Free> values_;
  std::size_t size_ = 0;
};

/// Point-to-grid interpolation state for one embedding snapshot.
class GridSums {
 public:
  GridSums(const Embedding& emb, const GridLayout& layout);

  const GridLayout& layout() const noexcept { return layout_; }

  /// FFT of K evaluated on all node offsets (K takes a squared distance).
  Spectrum kernel_spectrum(const std::function<double(double)>& kernel) const;

  /// Spreads one charge per point onto the grid and transforms it.
  Spectrum charge_spectrum(std::span<const double> charge) const;

  /// phi(i) for every point, given the kernel and charge spectra.
  std::vector<double> potential(const Spectrum& kernel, const Spectrum& charge) const;

 private:
  GridLayout layout_;
  std::size_t n_ = 0;
  std::vector<int> first_node_x_;  // first global node index of each point's box
  std::vector<int> first_node_y_;
  std::vector<double> weight_x_;   // n * nodes_per_box Lagrange weights
  std::vector<double> weight_y_;
  std::shared_ptr<FftBuffers> fft_;
};

}  // namespace htsne::detail
