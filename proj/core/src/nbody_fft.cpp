#include "nbody_fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "htsne/error.hpp"

namespace htsne::detail {

namespace {

// The FFTW planner is not thread-safe; plan creation and destruction go
// through this lock. Executing an existing plan is safe from any thread.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double* alloc_real(std::size_t count) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * count));
  if (p == nullptr) throw Error("fftw_malloc failed");
  return p;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t count) : data(alloc_real(count)) {}
  ~RealBuffer() { fftw_free(data); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* data;
};

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct FftBuffers {
  explicit FftBuffers(int side) : side(side) {
    const auto l = static_cast<std::size_t>(side);
    RealBuffer real(l * l);
    Spectrum spec(l * (l / 2 + 1));
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(side, side, real.data, as_fftw(spec.data()), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(side, side, as_fftw(spec.data()), real.data, FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) throw Error("FFTW planning failed");
  }
  ~FftBuffers() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;

  std::size_t real_size() const { return static_cast<std::size_t>(side) * static_cast<std::size_t>(side); }
  std::size_t spectrum_size() const {
    return static_cast<std::size_t>(side) * (static_cast<std::size_t>(side) / 2 + 1);
  }

  int side;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

namespace {

std::shared_ptr<FftBuffers> plans_for(int side) {
  static std::mutex cache_mutex;
  static std::map<int, std::shared_ptr<FftBuffers>> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(side);
  if (it != cache.end()) return it->second;
  // Grids change size as the embedding grows; keep the cache small.
  if (cache.size() >= 8) cache.clear();
  auto plans = std::make_shared<FftBuffers>(side);
  cache.emplace(side, plans);
  return plans;
}

// Lagrange basis on nodes 0..p-1 evaluated at t.
void lagrange_weights(double t, int p, double* out) {
  for (int k = 0; k < p; ++k) {
    double w = 1.0;
    for (int m = 0; m < p; ++m) {
      if (m != k) w *= (t - m) / static_cast<double>(k - m);
    }
    out[k] = w;
  }
}

}  // namespace

int next_smooth(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

Spectrum::Spectrum(std::size_t size)
    : values_(reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size))),
      size_(size) {
  if (!values_) throw Error("fftw_malloc failed");
}

void Spectrum::Free::operator()(std::complex<double>* p) const noexcept { fftw_free(p); }

GridSums::GridSums(const Embedding& emb, const GridLayout& layout)
    : layout_(layout), n_(emb.size()), fft_(plans_for(layout.fft_size())) {
  const int p = layout_.nodes_per_box;
  first_node_x_.resize(n_);
  first_node_y_.resize(n_);
  weight_x_.resize(n_ * static_cast<std::size_t>(p));
  weight_y_.resize(n_ * static_cast<std::size_t>(p));
  const double inv_h = 1.0 / layout_.spacing();

  auto locate = [&](double coord, int& first, double* weights) {
    int box = static_cast<int>(std::floor((coord - layout_.origin) / layout_.box_width));
    box = std::clamp(box, 0, layout_.boxes - 1);
    first = box * p;
    const double t = (coord - layout_.origin) * inv_h - first - 0.5;
    lagrange_weights(t, p, weights);
  };
  for (std::size_t i = 0; i < n_; ++i) {
    locate(emb.x(i), first_node_x_[i], &weight_x_[i * static_cast<std::size_t>(p)]);
    locate(emb.y(i), first_node_y_[i], &weight_y_[i * static_cast<std::size_t>(p)]);
  }
}

Spectrum GridSums::kernel_spectrum(const std::function<double(double)>& kernel) const {
  const int m = layout_.nodes();
  const int side = layout_.fft_size();
  const double h = layout_.spacing();
  RealBuffer table(fft_->real_size());

  // K depends on |du| and |dv| only, so one quadrant of node offsets is
  // evaluated and mirrored. Offsets u in [0, m) are +u, offsets in (m, 2m)
  // wrap to u - 2m. The row and column at u == m are never reached by node
  // pairs.
  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> quadrant(mm * mm);
  for (std::size_t a = 0; a < mm; ++a) {
    for (std::size_t b = a; b < mm; ++b) {
      const double dx = static_cast<double>(a) * h;
      const double dy = static_cast<double>(b) * h;
      quadrant[a * mm + b] = quadrant[b * mm + a] = kernel(dx * dx + dy * dy);
    }
  }
  std::vector<std::size_t> fold(static_cast<std::size_t>(side));
  for (int u = 0; u < side; ++u) fold[static_cast<std::size_t>(u)] = static_cast<std::size_t>(u < m ? u : side - u);
  for (int u = 0; u < side; ++u) {
    double* row = table.data + static_cast<std::size_t>(u) * static_cast<std::size_t>(side);
    if (u == m) {
      std::fill_n(row, side, 0.0);
      continue;
    }
    const double* q = quadrant.data() + fold[static_cast<std::size_t>(u)] * mm;
    for (int v = 0; v < side; ++v) row[v] = v == m ? 0.0 : q[fold[static_cast<std::size_t>(v)]];
  }
  Spectrum out(fft_->spectrum_size());
  fftw_execute_dft_r2c(fft_->forward, table.data, as_fftw(out.data()));
  return out;
}

Spectrum GridSums::charge_spectrum(std::span<const double> charge) const {
  if (charge.size() != n_) throw InvalidArgument("charge_spectrum: one charge per point expected");
  const auto side = static_cast<std::size_t>(layout_.fft_size());
  const int p = layout_.nodes_per_box;
  RealBuffer grid(fft_->real_size());
  std::fill_n(grid.data, fft_->real_size(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* wx = &weight_x_[i * static_cast<std::size_t>(p)];
    const double* wy = &weight_y_[i * static_cast<std::size_t>(p)];
    for (int a = 0; a < p; ++a) {
      double* row = grid.data + static_cast<std::size_t>(first_node_x_[i] + a) * side;
      const double qa = charge[i] * wx[a];
      for (int b = 0; b < p; ++b) row[first_node_y_[i] + b] += qa * wy[b];
    }
  }
  Spectrum out(fft_->spectrum_size());
  fftw_execute_dft_r2c(fft_->forward, grid.data, as_fftw(out.data()));
  return out;
}

std::vector<double> GridSums::potential(const Spectrum& kernel, const Spectrum& charge) const {
  const std::size_t count = fft_->spectrum_size();
  Spectrum product(count);
  for (std::size_t t = 0; t < count; ++t) product.data()[t] = kernel.data()[t] * charge.data()[t];

  RealBuffer grid(fft_->real_size());
  fftw_execute_dft_c2r(fft_->backward, as_fftw(product.data()), grid.data);

  const auto side = static_cast<std::size_t>(layout_.fft_size());
  const double norm = 1.0 / static_cast<double>(fft_->real_size());
  const int p = layout_.nodes_per_box;
  std::vector<double> phi(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* wx = &weight_x_[i * static_cast<std::size_t>(p)];
    const double* wy = &weight_y_[i * static_cast<std::size_t>(p)];
    double s = 0.0;
    for (int a = 0; a < p; ++a) {
      const double* row = grid.data + static_cast<std::size_t>(first_node_x_[i] + a) * side;
      double r = 0.0;
      for (int b = 0; b < p; ++b) r += wy[b] * row[first_node_y_[i] + b];
      s += wx[a] * r;
    }
    phi[i] = s * norm;
  }
  return phi;
}

}  // namespace htsne::detail
