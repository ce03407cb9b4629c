#include "gyro/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "gyro/errors.hpp"

namespace gyro {

namespace {

constexpr double kQuantum = 1152921504606846976.0;  // 2^60

// Supplies quantized to integers summing exactly to 2^60.
std::vector<std::int64_t> quantize(const std::vector<double>& m, double total) {
  std::vector<std::int64_t> q(m.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    q[i] = static_cast<std::int64_t>(std::llround(m[i] / total * kQuantum));
    sum += q[i];
  }
  const auto target = static_cast<std::int64_t>(kQuantum);
  if (!q.empty() && sum != target) {
    const auto big = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
    q[big] += target - sum;
  }
  return q;
}

// Primal network simplex on the bipartite graph sources -> sinks plus an artificial root.
// Tree arcs are stored on their child node; pivots keep the tree strongly feasible.
class NetworkSimplex {
 public:
  NetworkSimplex(const PointMeasure& src, const PointMeasure& dst,
                 const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand)
      : xs_(src.points), ys_(dst.points), n_(static_cast<int>(xs_.size())), m_(static_cast<int>(ys_.size())) {
    const int nodes = n_ + m_ + 1;
    root_ = nodes - 1;
    double dmax = 0.0;
    double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1, lo2 = lo1, hi2 = -lo1;
    for (const auto* set : {&xs_, &ys_}) {
      for (Vec2 p : *set) {
        lo1 = std::min(lo1, p.x1);
        hi1 = std::max(hi1, p.x1);
        lo2 = std::min(lo2, p.x2);
        hi2 = std::max(hi2, p.x2);
      }
    }
    dmax = std::hypot(hi1 - lo1, hi2 - lo2);
    art_cost_ = (dmax + 1.0) * nodes;
    eps_ = 1e-12 * std::max(1.0, dmax) + 16.0 * std::numeric_limits<double>::epsilon() * art_cost_;

    arcs_ = static_cast<long>(n_) * m_;
    block_ = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(arcs_))));
    y1_.resize(m_);
    y2_.resize(m_);
    row_.resize(m_);
    for (int j = 0; j < m_; ++j) {
      y1_[j] = ys_[j].x1;
      y2_[j] = ys_[j].x2;
    }
    parent_.assign(nodes, -1);
    arc_.assign(nodes, -1);
    up_.assign(nodes, 0);
    flow_.assign(nodes, 0);
    pi_.assign(nodes, 0.0);
    depth_.assign(nodes, 1);
    children_.assign(nodes, {});
    depth_[root_] = 0;
    // Start from the all-artificial tree: sources send their supply to the root and the root
    // feeds every sink. A zero-demand arc must point towards the root to keep the tree
    // strongly feasible.
    const long art_base = arcs_;
    for (int i = 0; i < n_; ++i) attach(i, root_, art_base + i, true, supply[i]);
    for (int j = 0; j < m_; ++j) attach(n_ + j, root_, art_base + n_ + j, demand[j] == 0, demand[j]);
    recompute_potentials();
  }

  long run() {
    long pivots = 0;
    long e;
    while (find_entering(e)) {
      pivot(e);
      // Potentials are updated incrementally; a periodic rebuild keeps rounding from accumulating.
      if (++pivots % 4096 == 0) recompute_potentials();
    }
    recompute_potentials();
    return pivots;
  }

  double cost() const {
    // Sum over tree arcs: non-tree arcs carry no flow.
    long double acc = 0.0L;
    for (int u = 0; u < root_; ++u) {
      if (arc_[u] < arcs_ && flow_[u] != 0) acc += static_cast<long double>(flow_[u]) * arc_cost(arc_[u]);
    }
    return static_cast<double>(acc / static_cast<long double>(kQuantum));
  }

  bool artificial_flow() const {
    for (int u = 0; u < root_; ++u) {
      if (arc_[u] >= arcs_ && flow_[u] != 0) return true;
    }
    return false;
  }

  // Kantorovich potential: f(x_i) = -pi_i, f(y_j) = -pi_{n+j} up to a common constant.
  void potentials(std::vector<double>& fs, std::vector<double>& ft) const {
    fs.resize(n_);
    ft.resize(m_);
    for (int i = 0; i < n_; ++i) fs[i] = pi_[i];
    for (int j = 0; j < m_; ++j) ft[j] = pi_[n_ + j];
  }

 private:
  double dist(int i, int j) const {
    const double d1 = xs_[i].x1 - ys_[j].x1;
    const double d2 = xs_[i].x2 - ys_[j].x2;
    return std::sqrt(d1 * d1 + d2 * d2);
  }
  double arc_cost(long e) const {
    if (e >= arcs_) return art_cost_;
    return dist(static_cast<int>(e / m_), static_cast<int>(e % m_));
  }
  // Endpoints of arc e (source node, target node).
  std::pair<int, int> ends(long e) const {
    if (e < arcs_) return {static_cast<int>(e / m_), n_ + static_cast<int>(e % m_)};
    const int k = static_cast<int>(e - arcs_);
    return {k, root_};  // orientation of artificial arcs is tracked by up_
  }

  void attach(int child, int par, long arc, bool up, std::int64_t flow) {
    parent_[child] = par;
    arc_[child] = arc;
    up_[child] = up ? 1 : 0;
    flow_[child] = flow;
    children_[par].push_back(child);
  }

  // Block pricing over whole source rows; each row is evaluated into a buffer so the distance
  // computation vectorizes.
  bool find_entering(long& best_arc) {
    double best = -eps_;
    best_arc = -1;
    const double* pt = pi_.data() + n_;
    for (int scanned = 0, in_block = 0; scanned < n_; ++scanned) {
      const int i = next_row_;
      if (++next_row_ == n_) next_row_ = 0;
      const double xi = xs_[i].x1;
      const double yi = xs_[i].x2;
      const double pii = pi_[i];
      double* rc = row_.data();
      for (int j = 0; j < m_; ++j) {
        const double d1 = xi - y1_[j];
        const double d2 = yi - y2_[j];
        rc[j] = std::sqrt(d1 * d1 + d2 * d2) + (pii - pt[j]);
      }
      for (int j = 0; j < m_; ++j) {
        if (rc[j] < best) {
          best = rc[j];
          best_arc = static_cast<long>(i) * m_ + j;
        }
      }
      in_block += m_;
      if (in_block >= block_) {
        if (best_arc >= 0) return true;
        in_block = 0;
      }
    }
    return best_arc >= 0;
  }

  int join_of(int a, int b) const {
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    return a;
  }

  void remove_child(int par, int child) {
    auto& c = children_[par];
    auto it = std::find(c.begin(), c.end(), child);
    *it = c.back();
    c.pop_back();
  }

  void pivot(long e) {
    const int first = static_cast<int>(e / m_);
    const int second = n_ + static_cast<int>(e % m_);
    const int join = join_of(first, second);
    // Flow is pushed first -> second -> join -> first. On the first side it moves down
    // the tree, so arcs pointing up decrease; on the second side it moves up.
    std::int64_t delta = std::numeric_limits<std::int64_t>::max();
    int u_out = -1;
    int side = 0;
    for (int u = first; u != join; u = parent_[u]) {
      if (up_[u] && flow_[u] < delta) {
        delta = flow_[u];
        u_out = u;
        side = 1;
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[u] <= delta) {
        delta = flow_[u];
        u_out = u;
        side = 2;
      }
    }
    if (u_out < 0) throw NumericalError("transport: unbounded pivot");
    if (delta > 0) {
      for (int u = first; u != join; u = parent_[u]) flow_[u] += up_[u] ? -delta : delta;
      for (int u = second; u != join; u = parent_[u]) flow_[u] += up_[u] ? delta : -delta;
    }
    // The subtree below the leaving arc is re-hung from the entering arc.
    const int u_in = side == 1 ? first : second;
    const int v_in = side == 1 ? second : first;
    remove_child(parent_[u_out], u_out);
    int child = u_in;
    int par = v_in;
    long carry_arc = e;
    bool carry_up = side == 1;  // entering arc points source -> sink, i.e. first -> second
    std::int64_t carry_flow = delta;
    while (true) {
      const int old_parent = parent_[child];
      const long old_arc = arc_[child];
      const bool old_up = up_[child] != 0;
      const std::int64_t old_flow = flow_[child];
      if (child != u_out) remove_child(old_parent, child);
      parent_[child] = par;
      arc_[child] = carry_arc;
      up_[child] = carry_up ? 1 : 0;
      flow_[child] = carry_flow;
      children_[par].push_back(child);
      if (child == u_out) break;
      carry_arc = old_arc;
      carry_up = !old_up;
      carry_flow = old_flow;
      par = child;
      child = old_parent;
    }
    refresh_subtree(u_in);
  }

  void set_potential(int u) {
    const double c = arc_cost(arc_[u]);
    const int p = parent_[u];
    pi_[u] = up_[u] ? pi_[p] - c : pi_[p] + c;
    depth_[u] = depth_[p] + 1;
  }

  void refresh_subtree(int top) {
    stack_.clear();
    stack_.push_back(top);
    while (!stack_.empty()) {
      const int u = stack_.back();
      stack_.pop_back();
      set_potential(u);
      for (int c : children_[u]) stack_.push_back(c);
    }
  }

  void recompute_potentials() {
    pi_[root_] = 0.0;
    depth_[root_] = 0;
    for (int c : children_[root_]) refresh_subtree(c);
  }

  std::vector<Vec2> xs_, ys_;
  int n_, m_;
  int root_ = 0;
  double art_cost_ = 0.0;
  double eps_ = 0.0;
  long arcs_ = 0;
  long block_ = 10;
  int next_row_ = 0;
  std::vector<double> y1_, y2_, row_;
  std::vector<int> parent_;
  std::vector<long> arc_;
  std::vector<char> up_;
  std::vector<std::int64_t> flow_;
  std::vector<double> pi_;
  std::vector<int> depth_;
  std::vector<std::vector<int>> children_;
  std::vector<int> stack_;
};

}  // namespace

TransportSolution solve_transport(const PointMeasure& source, const PointMeasure& sink) {
  if (source.points.size() != source.masses.size() || sink.points.size() != sink.masses.size()) {
    throw ValidationError("transport: point/mass size mismatch");
  }
  double ms = 0.0, mt = 0.0;
  for (double v : source.masses) {
    if (!(v >= 0.0)) throw ValidationError("transport: negative mass");
    ms += v;
  }
  for (double v : sink.masses) {
    if (!(v >= 0.0)) throw ValidationError("transport: negative mass");
    mt += v;
  }
  TransportSolution sol;
  if (ms == 0.0 && mt == 0.0) return sol;
  if (std::abs(ms - mt) > 1e-9 * std::max(ms, mt)) throw ValidationError("transport: unbalanced masses");
  if (source.points.empty() || sink.points.empty()) return sol;
  const double total = 0.5 * (ms + mt);
  NetworkSimplex ns(source, sink, quantize(source.masses, ms), quantize(sink.masses, mt));
  sol.pivots = ns.run();
  if (ns.artificial_flow()) throw NumericalError("transport: artificial arcs carry flow at optimum");
  sol.cost = ns.cost() * total;
  ns.potentials(sol.source_potential, sol.sink_potential);
  // pi_t - pi_s <= |x - y| on every arc, so f = pi is 1-Lipschitz across the supports.
  return sol;
}

namespace {

bool lexicographically_less(const GriddedDensity& a, const GriddedDensity& b) {
  return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(), b.values.end());
}

// Removes the lightest points while their combined mass stays within the budget.
void drop_light_cells(PointMeasure& m, double budget) {
  std::vector<std::size_t> order(m.masses.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m.masses[a] < m.masses[b]; });
  std::vector<char> keep(order.size(), 1);
  double dropped = 0.0;
  for (std::size_t k : order) {
    if (dropped + m.masses[k] > budget) break;
    dropped += m.masses[k];
    keep[k] = 0;
  }
  PointMeasure out;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (!keep[k]) continue;
    out.points.push_back(m.points[k]);
    out.masses.push_back(m.masses[k]);
  }
  m = std::move(out);
}

}  // namespace

double wasserstein1(const GriddedDensity& mu_in, const GriddedDensity& nu_in, const W1Options& opt) {
  if (!(mu_in.grid == nu_in.grid)) throw ValidationError("wasserstein1: grids differ");
  // Canonical argument order makes the result exactly symmetric.
  const bool swap = lexicographically_less(nu_in, mu_in);
  const GriddedDensity& mu = swap ? nu_in : mu_in;
  const GriddedDensity& nu = swap ? mu_in : nu_in;
  const double area = mu.grid.cell_area();
  double mass_mu = 0.0, mass_nu = 0.0;
  for (double v : mu.values) mass_mu += std::max(0.0, v) * area;
  for (double v : nu.values) mass_nu += std::max(0.0, v) * area;
  if (std::abs(mass_mu - mass_nu) > 1e-6) throw ValidationError("wasserstein1: masses differ by more than 1e-6");
  if (!(mass_mu > 0.0) || !(mass_nu > 0.0)) throw ValidationError("wasserstein1: empty density");
  // Renormalize, sparsify, then net out the common mass in each cell: for a metric cost the
  // shared part can stay in place.
  PointMeasure src, dst;
  const GridSpec& g = mu.grid;
  for (int i2 = 0; i2 < g.n; ++i2) {
    for (int i1 = 0; i1 < g.n; ++i1) {
      double a = std::max(0.0, mu.at(i1, i2)) * area / mass_mu;
      double b = std::max(0.0, nu.at(i1, i2)) * area / mass_nu;
      if (a <= opt.sparsify) a = 0.0;
      if (b <= opt.sparsify) b = 0.0;
      const double d = a - b;
      if (d > 0.0) {
        src.points.push_back(g.node(i1, i2));
        src.masses.push_back(d);
      } else if (d < 0.0) {
        dst.points.push_back(g.node(i1, i2));
        dst.masses.push_back(-d);
      }
    }
  }
  if (opt.tail_mass > 0.0) {
    drop_light_cells(src, opt.tail_mass);
    drop_light_cells(dst, opt.tail_mass);
  }
  const std::size_t support = std::max(src.points.size(), dst.points.size());
  if (support > opt.max_support) {
    throw SupportTooLarge("wasserstein1: support exceeds the solver limit; downsample by 2x2 aggregation", support);
  }
  const double ms = std::accumulate(src.masses.begin(), src.masses.end(), 0.0);
  const double mt = std::accumulate(dst.masses.begin(), dst.masses.end(), 0.0);
  if (ms == 0.0 && mt == 0.0) return 0.0;
  // Sparsification can unbalance the parts slightly; rescale the smaller to match.
  const double target = 0.5 * (ms + mt);
  for (double& v : src.masses) v *= target / ms;
  for (double& v : dst.masses) v *= target / mt;
  return solve_transport(src, dst).cost;
}

double wasserstein1_adaptive(const GriddedDensity& mu, const GriddedDensity& nu, int* levels,
                             const W1Options& opt) {
  GriddedDensity a = mu;
  GriddedDensity b = nu;
  int used = 0;
  while (true) {
    try {
      const double w = wasserstein1(a, b, opt);
      if (levels) *levels = used;
      return w;
    } catch (const SupportTooLarge&) {
      if (a.grid.n <= 4) throw;
      a = downsample_2x2(a);
      b = downsample_2x2(b);
      ++used;
    }
  }
}

}  // namespace gyro
