#include "adiabat/mode_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "adiabat/error.hpp"

namespace adiabat {

using cplx = std::complex<double>;

ModePolynomial::ModePolynomial(int n, int degree) : n_(n), degree_(degree) {
  require(n >= 1 && degree >= 0, ErrorCode::invalid_argument, "bad polynomial shape");
}

void ModePolynomial::add(Term term, cplx coefficient) {
  require(static_cast<int>(term.size()) == degree_, ErrorCode::dimension_mismatch,
          "term degree does not match the polynomial");
  for (int f : term)
    require(f != 0 && std::abs(f) <= n_, ErrorCode::invalid_argument, "mode index out of range");
  terms_[std::move(term)] += coefficient;
}

ModePolynomial& ModePolynomial::operator+=(const ModePolynomial& other) {
  require(other.n_ == n_ && other.degree_ == degree_, ErrorCode::dimension_mismatch,
          "adding polynomials of different shape");
  for (const auto& [term, c] : other.terms_) terms_[term] += c;
  return *this;
}

cplx ModePolynomial::evaluate(std::span<const cplx> xi) const {
  require(static_cast<int>(xi.size()) == n_, ErrorCode::dimension_mismatch,
          "xi has the wrong length");
  cplx acc{};
  for (const auto& [term, c] : terms_) {
    cplx prod = c;
    for (int f : term) prod *= f > 0 ? xi[f - 1] : std::conj(xi[-f - 1]);
    acc += prod;
  }
  return acc;
}

ModePolynomial ModePolynomial::canonical() const {
  ModePolynomial out(n_, degree_);
  for (const auto& [term, c] : terms_) {
    Term sorted = term;
    std::sort(sorted.begin(), sorted.end());
    out.terms_[sorted] += c;
  }
  std::erase_if(out.terms_, [](const auto& kv) { return kv.second == cplx{}; });
  return out;
}

double ModePolynomial::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& [term, c] : terms_) best = std::max(best, std::abs(c));
  return best;
}

double ModePolynomial::plus_norm() const {
  return std::pow(n_ + 1.0, 0.5 * (degree_ - 2)) * max_abs_coefficient();
}

bool ModePolynomial::momentum_conserving() const {
  const int period = 2 * (n_ + 1);
  for (const auto& [term, c] : terms_) {
    bool ok = false;
    const int s = static_cast<int>(term.size());
    for (int signs = 0; signs < (1 << s) && !ok; ++signs) {
      int total = 0;
      for (int l = 0; l < s; ++l) total += ((signs >> l) & 1 ? -1 : 1) * std::abs(term[l]);
      ok = total % period == 0;
    }
    if (!ok) return false;
  }
  return true;
}

ModePolynomial bracket(const ModePolynomial& f, const ModePolynomial& g,
                       std::span<const double> omega) {
  require(f.size() == g.size() && static_cast<int>(omega.size()) == f.size(),
          ErrorCode::dimension_mismatch, "bracket operands have different N");
  ModePolynomial out(f.size(), f.degree() + g.degree() - 2);
  for (const auto& [a, ca] : f.terms()) {
    for (const auto& [b, cb] : g.terms()) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          if (a[i] != -b[j]) continue;
          // {xi_k, eta_k} = i omega_k, {eta_k, xi_k} = -i omega_k.
          const double w = omega[std::abs(a[i]) - 1];
          const cplx factor = a[i] > 0 ? cplx(0.0, w) : cplx(0.0, -w);
          ModePolynomial::Term t;
          t.reserve(a.size() + b.size() - 2);
          for (std::size_t x = 0; x < a.size(); ++x)
            if (x != i) t.push_back(a[x]);
          for (std::size_t y = 0; y < b.size(); ++y)
            if (y != j) t.push_back(b[y]);
          out.add(std::move(t), ca * cb * factor);
        }
      }
    }
  }
  return out;
}

ModePolynomial h0_polynomial(int n) {
  ModePolynomial out(n, 2);
  for (int k = 1; k <= n; ++k) out.add({k, -k}, 1.0);
  return out;
}

namespace {

// sum over ordered resonant triples and sign patterns of
// i c tau1 tau2 tau3 w s coefficient(triple, pattern) Xi_{tau,k}
template <class Coefficient>
ModePolynomial cubic_polynomial(int n, std::span<const ResonantTriple> triples,
                                Coefficient&& coefficient) {
  ModePolynomial out(n, 3);
  const cplx c(0.0, cubic_prefactor(n));
  for (const auto& t : triples) {
    const int k[3] = {t.k1, t.k2, t.k3};
    for (int p = 0; p < 8; ++p) {
      ModePolynomial::Term term(3);
      double sign = t.weight * kind_sign(t.kind);
      for (int l = 0; l < 3; ++l) {
        term[l] = tau_sign(p, l) * k[l];
        sign *= tau_sign(p, l);
      }
      out.add(std::move(term), c * sign * coefficient(t, p));
    }
  }
  return out;
}

}  // namespace

ModePolynomial h1_polynomial(int n) {
  // The triple table does not depend on the profile; nu = omega gives ratio 1.
  const PacketObservable table = PacketObservable::build(NuProfile::constant(1.0), n);
  return cubic_polynomial(n, table.triples(), [](const ResonantTriple&, int) { return 1.0; });
}

ModePolynomial phi0_polynomial(const PacketObservable& packet) {
  ModePolynomial out(packet.size(), 2);
  for (int k = 1; k <= packet.size(); ++k) out.add({k, -k}, packet.g()[k - 1]);
  return out;
}

ModePolynomial phi1_polynomial(const PacketObservable& packet) {
  return cubic_polynomial(packet.size(), packet.triples(),
                          [](const ResonantTriple& t, int p) { return t.ratio[p]; });
}

std::string PsTestFunction::name() const {
  switch (kind) {
    case PsKind::h1: return "H1";
    case PsKind::phi0: return "Phi0";
    case PsKind::phi1: return "Phi1";
  }
  return "unknown";
}

double PsTestFunction::operator()(const ChainState& state) const {
  switch (kind) {
    case PsKind::h1: {
      double acc = 0.0;
      for (double r : bond_extensions(state.q)) acc += r * r * r / 3.0;
      return acc;
    }
    case PsKind::phi0: return phi0(state, *packet);
    case PsKind::phi1: return phi1(state, *packet);
  }
  return 0.0;
}

PsTestFunction make_ps_test(PsKind kind, const NuProfile& profile, int n) {
  PsTestFunction f;
  f.kind = kind;
  f.packet = std::make_shared<const PacketObservable>(PacketObservable::build(profile, n));
  switch (kind) {
    case PsKind::h1:
      f.degree = 3;
      f.plus_norm = 3.0 / 12.0;  // weight 3 on the sum triples times the 1/12 prefactor
      break;
    case PsKind::phi0: {
      f.degree = 2;
      double best = 0.0;
      for (double g : f.packet->g()) best = std::max(best, std::abs(g));
      f.plus_norm = best;
      break;
    }
    case PsKind::phi1: {
      f.degree = 3;
      double best = 0.0;
      for (const auto& t : f.packet->triples())
        for (double r : t.ratio) best = std::max(best, t.weight * std::abs(r));
      f.plus_norm = best / 12.0;
      break;
    }
  }
  return f;
}

}  // namespace adiabat
