#include "gridtopo/lap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "gridtopo/errors.hpp"

namespace gridtopo {

bool is_laplacian(const Matrix& a, double tol, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (a.rows() != a.cols()) return fail("not square");
  const int m = static_cast<int>(a.rows());
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (a(i, j) != a(j, i)) {
        // exact symmetry is required of finalized outputs; allow tol for raw checks
        if (std::abs(a(i, j) - a(j, i)) > tol * scale) return fail("not symmetric");
      }
      if (a(i, j) > 0.0 || a(j, i) > 0.0) return fail("positive off-diagonal");
    }
    if (std::abs(a.row(i).sum()) > tol * scale) {
      std::ostringstream os;
      os << "row " << i << " sum " << a.row(i).sum() << " exceeds tolerance";
      return fail(os.str());
    }
  }
  return true;
}

ComplexAdmittance build_admittance(const LineList& lines) {
  const int m = lines.m;
  if (m < 1) throw schema_error("bus count must be at least 1");
  Matrix g = Matrix::Zero(m, m);
  Matrix b = Matrix::Zero(m, m);
  std::map<std::pair<int, int>, int> seen;
  for (const auto& ln : lines.lines) {
    if (ln.from < 1 || ln.from > m || ln.to < 1 || ln.to > m || ln.from == ln.to)
      throw schema_error("line endpoints out of range or self-loop");
    if (ln.g_line < 0.0 || ln.b_tilde_line < 0.0)
      throw schema_error("negative line admittance");
    auto key = std::minmax(ln.from, ln.to);
    if (!seen.emplace(key, 1).second) {
      std::ostringstream os;
      os << "duplicate line for pair (" << key.first << "," << key.second << ")";
      throw schema_error(os.str());
    }
    const int i = ln.from - 1, j = ln.to - 1;
    g(i, j) = g(j, i) = -ln.g_line;
    b(i, j) = b(j, i) = -ln.b_tilde_line;
  }
  for (int i = 0; i < m; ++i) {
    g(i, i) = -(g.row(i).sum() - g(i, i));
    b(i, i) = -(b.row(i).sum() - b(i, i));
  }
  return {RealLaplacian(m, std::move(g)), RealLaplacian(m, std::move(b))};
}

RealLaplacian project_to_laplacian(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  const int m = static_cast<int>(a.rows());
  Matrix x = 0.5 * (a + a.transpose());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && x(i, j) > 0.0) x(i, j) = 0.0;
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) off += x(i, j);
    x(i, i) = -off;
  }
  return RealLaplacian(m, std::move(x));
}

RealLaplacian threshold_offdiag(const RealLaplacian& a) {
  const int m = a.m;
  const double dmin = a.entries.diagonal().minCoeff();
  const double tau = dmin / static_cast<double>(m);
  if (!(tau > 0.0)) return a;
  Matrix x = a.entries;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && std::abs(x(i, j)) < tau) x(i, j) = 0.0;
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != i) off += x(i, j);
    x(i, i) = -off;
  }
  return RealLaplacian(m, std::move(x));
}

double fscore(const SupportSet& truth, const SupportSet& est) {
  if (truth.m != est.m) throw std::invalid_argument("support sets of different size");
  if (truth.edges.empty() && est.edges.empty()) return 1.0;
  int tp = 0;
  for (const auto& e : est.edges)
    if (truth.edges.count(e)) ++tp;
  const int fp = static_cast<int>(est.edges.size()) - tp;
  const int fn = static_cast<int>(truth.edges.size()) - tp;
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

double mse(const Matrix& truth, const Matrix& est) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols())
    throw std::invalid_argument("mse dimension mismatch");
  const double m = static_cast<double>(truth.rows());
  return (est - truth).squaredNorm() / (m * m);
}

SupportSet support_of(const RealLaplacian& a, double tol) {
  SupportSet s;
  s.m = a.m;
  for (int i = 0; i < a.m; ++i)
    for (int j = i + 1; j < a.m; ++j)
      if (std::abs(a.entries(i, j)) > tol) s.edges.insert({i + 1, j + 1});
  return s;
}

double magnitude_ratio(const RealLaplacian& g, const RealLaplacian& b_tilde) {
  if (g.m != b_tilde.m) throw std::invalid_argument("ratio dimension mismatch");
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < g.m; ++i) {
    for (int j = 0; j < g.m; ++j) {
      const double gv = g.entries(i, j), bv = b_tilde.entries(i, j);
      if (gv != 0.0 && bv != 0.0) {
        sum += std::abs(bv) / std::abs(gv);
        ++count;
      }
    }
  }
  if (count == 0) throw numerical_error("magnitude ratio undefined: no jointly nonzero entries");
  return sum / count;
}

}  // namespace gridtopo
