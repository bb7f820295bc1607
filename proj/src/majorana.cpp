#include "ghft/majorana.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ghft {

ModeLayout::ModeLayout(int sites, int flavors_per_site) : sites_(sites), flavors_(flavors_per_site) {
  if (sites < 1 || flavors_per_site < 1) throw Error("ModeLayout: sites and flavors must be positive");
}

int ModeLayout::dirac_index(int site, int flavor) const {
  if (site < 0 || site >= sites_ || flavor < 0 || flavor >= flavors_)
    throw Error("ModeLayout: site/flavor out of range");
  return site * flavors_ + flavor;
}

DiracTermList& DiracTermList::operator+=(const DiracTermList& other) {
  hopping.insert(hopping.end(), other.hopping.begin(), other.hopping.end());
  number.insert(number.end(), other.number.begin(), other.number.end());
  density.insert(density.end(), other.density.begin(), other.density.end());
  return *this;
}

// ---------------------------------------------------------------------------

MajoranaHamiltonian::MajoranaHamiltonian(int modes) : modes_(modes), t_(Matrix::Zero(2 * modes, 2 * modes)) {
  if (modes < 1) throw Error("MajoranaHamiltonian: need at least one mode");
}

void MajoranaHamiltonian::add_quadratic(int k, int l, double v) {
  if (k < 0 || l < 0 || k >= dim() || l >= dim()) throw Error("add_quadratic: index out of range");
  if (k == l) throw Error("add_quadratic: diagonal entry of an antisymmetric matrix");
  t_(k, l) += v;
  t_(l, k) -= v;
}

void MajoranaHamiltonian::set_quadratic(const Matrix& t) {
  if (t.rows() != dim() || t.cols() != dim()) throw Error("set_quadratic: dimension mismatch");
  if (max_abs(t + t.transpose()) > 1e-12 * (1.0 + max_abs(t)))
    throw Error("set_quadratic: matrix is not antisymmetric");
  t_ = antisymmetrize(t);
}

namespace {

// Sorts idx in place and returns the permutation sign.
int sort_with_sign(std::array<int, 4>& idx) {
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j + 1 < 4 - i; ++j)
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
  return sign;
}

}  // namespace

void MajoranaHamiltonian::add_quartic(std::array<int, 4> idx, double v) {
  for (int x : idx)
    if (x < 0 || x >= dim()) throw Error("add_quartic: index out of range");
  const int sign = sort_with_sign(idx);
  for (int i = 0; i + 1 < 4; ++i)
    if (idx[i] == idx[i + 1]) throw Error("add_quartic: indices must be distinct");
  auto it = std::lower_bound(u_.begin(), u_.end(), idx,
                             [](const QuarticTerm& t, const std::array<int, 4>& key) { return t.index < key; });
  if (it != u_.end() && it->index == idx) {
    it->value += sign * v;
  } else {
    u_.insert(it, QuarticTerm{idx, sign * v});
  }
}

double MajoranaHamiltonian::quartic_at(int k, int l, int m, int n) const {
  std::array<int, 4> idx{k, l, m, n};
  const int sign = sort_with_sign(idx);
  for (int i = 0; i + 1 < 4; ++i)
    if (idx[i] == idx[i + 1]) return 0.0;
  auto it = std::lower_bound(u_.begin(), u_.end(), idx,
                             [](const QuarticTerm& t, const std::array<int, 4>& key) { return t.index < key; });
  if (it != u_.end() && it->index == idx) return sign * it->value;
  return 0.0;
}

MajoranaHamiltonian& MajoranaHamiltonian::operator+=(const MajoranaHamiltonian& other) {
  if (other.modes_ != modes_) throw Error("MajoranaHamiltonian: mode count mismatch");
  t_ += other.t_;
  for (const auto& q : other.u_) add_quartic(q.index, q.value);
  offset_ += other.offset_;
  return *this;
}

// ---------------------------------------------------------------------------

MajoranaPolynomial MajoranaPolynomial::scalar(cplx v) {
  MajoranaPolynomial p;
  p.terms_[{}] = v;
  return p;
}

MajoranaPolynomial MajoranaPolynomial::linear(const std::vector<std::pair<int, cplx>>& terms) {
  MajoranaPolynomial p;
  for (const auto& [k, v] : terms) p.terms_[{k}] += v;
  return p;
}

MajoranaPolynomial MajoranaPolynomial::operator*(const MajoranaPolynomial& rhs) const {
  MajoranaPolynomial out;
  for (const auto& [w1, v1] : terms_) {
    for (const auto& [w2, v2] : rhs.terms_) {
      Word w(w1);
      w.insert(w.end(), w2.begin(), w2.end());
      // inversions between the two sorted halves give the reordering sign
      int inversions = 0;
      for (int a : w1)
        for (int b : w2)
          if (a > b) ++inversions;
      std::sort(w.begin(), w.end());
      Word reduced;
      reduced.reserve(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == w[i + 1]) {
          ++i;  // c_j c_j = 1
          continue;
        }
        reduced.push_back(w[i]);
      }
      const double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
      out.terms_[reduced] += sign * v1 * v2;
    }
  }
  return out;
}

MajoranaPolynomial& MajoranaPolynomial::operator+=(const MajoranaPolynomial& rhs) {
  for (const auto& [w, v] : rhs.terms_) terms_[w] += v;
  return *this;
}

MajoranaPolynomial& MajoranaPolynomial::operator*=(cplx s) {
  for (auto& [w, v] : terms_) v *= s;
  return *this;
}

MajoranaPolynomial dirac_operator(int j, bool dagger, int modes) {
  // a = (c_j - i c_{j+M}) / 2,  a^dag = (c_j + i c_{j+M}) / 2
  const cplx im = dagger ? cplx(0.0, 0.5) : cplx(0.0, -0.5);
  return MajoranaPolynomial::linear({{j, cplx(0.5, 0.0)}, {j + modes, im}});
}

MajoranaHamiltonian to_hamiltonian(const MajoranaPolynomial& p, int modes, double tol) {
  MajoranaHamiltonian h(modes);
  for (const auto& [w, z] : p.terms()) {
    if (std::abs(z) <= tol) continue;
    switch (w.size()) {
      case 0:
        if (std::abs(z.imag()) > tol) throw Error("to_hamiltonian: non-real scalar term");
        h.add_offset(z.real());
        break;
      case 2: {
        // z c_k c_l = i (T_kl c_k c_l + T_lk c_l c_k) = 2 i T_kl c_k c_l
        const cplx t = z / cplx(0.0, 2.0);
        if (std::abs(t.imag()) > tol) throw Error("to_hamiltonian: non-Hermitian quadratic term");
        h.add_quadratic(w[0], w[1], t.real());
        break;
      }
      case 4: {
        const cplx v = z / 24.0;
        if (std::abs(v.imag()) > tol) throw Error("to_hamiltonian: non-Hermitian quartic term");
        h.add_quartic({w[0], w[1], w[2], w[3]}, v.real());
        break;
      }
      default: {
        std::ostringstream msg;
        msg << "to_hamiltonian: unsupported Majorana word of length " << w.size();
        throw Error(msg.str());
      }
    }
  }
  return h;
}

MajoranaHamiltonian quadratic_from_dirac(const CMatrix& a, const CMatrix& b) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.rows() != n || b.cols() != n) throw Error("quadratic_from_dirac: dimension mismatch");
  MajoranaPolynomial p;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != cplx(0.0)) {
        MajoranaPolynomial t = dirac_operator(i, true, n) * dirac_operator(j, false, n);
        t *= a(i, j);
        p += t;
      }
      if (b(i, j) != cplx(0.0)) {
        MajoranaPolynomial t = dirac_operator(i, true, n) * dirac_operator(j, true, n);
        t *= 0.5 * b(i, j);
        p += t;
        MajoranaPolynomial c = dirac_operator(j, false, n) * dirac_operator(i, false, n);
        c *= 0.5 * std::conj(b(i, j));
        p += c;
      }
    }
  }
  return to_hamiltonian(p, n, 1e-12 * (1.0 + max_abs(a) + max_abs(b)));
}

MajoranaHamiltonian compile_hamiltonian(const ModeLayout& layout, const DiracTermList& terms) {
  const int m = layout.modes();
  auto check = [m](int i, const char* what) {
    if (i < 0 || i >= m) throw Error(std::string("compile_hamiltonian: ") + what + " index out of range");
  };
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw Error(std::string("compile_hamiltonian: non-finite ") + what);
  };
  auto number_op = [m](int i) { return dirac_operator(i, true, m) * dirac_operator(i, false, m); };

  MajoranaPolynomial p;
  for (const auto& h : terms.hopping) {
    check(h.i, "hopping");
    check(h.j, "hopping");
    finite(h.amplitude, "hopping amplitude");
    if (h.i == h.j) throw Error("compile_hamiltonian: hopping term with i == j");
    MajoranaPolynomial t = dirac_operator(h.i, true, m) * dirac_operator(h.j, false, m);
    t += dirac_operator(h.j, true, m) * dirac_operator(h.i, false, m);
    t *= -h.amplitude;
    p += t;
  }
  for (const auto& n : terms.number) {
    check(n.i, "number");
    finite(n.coefficient, "number coefficient");
    MajoranaPolynomial t = number_op(n.i);
    t *= n.coefficient;
    p += t;
  }
  for (const auto& d : terms.density) {
    check(d.i, "density");
    check(d.j, "density");
    finite(d.coefficient, "density coefficient");
    if (d.i == d.j) throw Error("compile_hamiltonian: density-density term with i == j (use a number term)");
    MajoranaPolynomial t = number_op(d.i) * number_op(d.j);
    t *= d.coefficient;
    p += t;
  }
  return to_hamiltonian(p, m);
}

}  // namespace ghft
