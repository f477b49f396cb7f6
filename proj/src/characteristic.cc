#include <algorithm>
#include <cmath>

#include "commitment_games/equilibria.h"

namespace cgames {

double Polynomial::Evaluate(const Eigen::VectorXd& p) const {
  double total = 0.0;
  for (const Monomial& m : terms) {
    double v = m.coef;
    for (int var : m.vars) v *= p[var];
    total += v;
  }
  return total;
}

void Polynomial::AddGradient(
    const Eigen::VectorXd& p,
    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) const {
  for (const Monomial& m : terms) {
    for (size_t k = 0; k < m.vars.size(); ++k) {
      double v = m.coef;
      for (size_t l = 0; l < m.vars.size(); ++l)
        if (l != k) v *= p[m.vars[l]];
      row[m.vars[k]] += v;
    }
  }
}

namespace {

// Utility difference u_i(ref, a_-i) - u_i(other, a_-i) summed against the
// opposing support variables, in lexicographic order of a_-i.
Polynomial DifferencePolynomial(const Game& game, const Supports& support,
                                const std::vector<int>& offsets, int player,
                                int ref, int other) {
  const int n = game.num_players();
  std::vector<int> sizes(n, 1);
  for (int j = 0; j < n; ++j)
    if (j != player) sizes[j] = static_cast<int>(support[j].size());
  Polynomial poly;
  std::vector<int> pos(n, 0);
  Profile a(n);
  do {
    Monomial m;
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      a[j] = support[j][pos[j]];
      m.vars.push_back(offsets[j] + pos[j]);
    }
    a[player] = ref;
    m.coef = game.utility(player, a);
    a[player] = other;
    m.coef -= game.utility(player, a);
    poly.terms.push_back(std::move(m));
  } while (NextProfile(sizes, pos));
  return poly;
}

}  // namespace

CharacteristicSystem BuildCharacteristicSystem(const Game& game,
                                               const Supports& support) {
  const int n = game.num_players();
  if (static_cast<int>(support.size()) != n)
    throw GameError("one support list per player required");
  CharacteristicSystem sys;
  sys.num_players = n;
  sys.support = support;
  sys.offsets.assign(n, 0);
  int total = 0;
  for (int i = 0; i < n; ++i) {
    if (support[i].empty()) throw GameError("empty support");
    auto sorted = support[i];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw GameError("support lists must not repeat actions");
    for (int a : support[i])
      if (a < 0 || a >= game.num_actions(i))
        throw GameError("support action out of range");
    sys.offsets[i] = total;
    total += static_cast<int>(support[i].size());
  }
  sys.num_variables = total;

  for (int i = 0; i < n; ++i) {
    Polynomial norm;
    for (size_t m = 0; m < support[i].size(); ++m)
      norm.terms.push_back({1.0, {sys.offsets[i] + static_cast<int>(m)}});
    sys.components.push_back(std::move(norm));
    sys.info.push_back({-1, i, -1});
  }
  for (int i = 0; i < n; ++i) {
    const int ref = support[i][0];
    for (size_t k = 1; k < support[i].size(); ++k) {
      sys.components.push_back(DifferencePolynomial(game, support, sys.offsets,
                                                    i, ref, support[i][k]));
      sys.info.push_back({i, -1, support[i][k]});
    }
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (std::find(support[i].begin(), support[i].end(), a) !=
          support[i].end())
        continue;
      sys.residuals.push_back(
          DifferencePolynomial(game, support, sys.offsets, i, ref, a));
      sys.residual_info.emplace_back(i, a);
    }
  }
  sys.rhs = Eigen::VectorXd::Zero(total);
  for (int i = 0; i < n; ++i) sys.rhs[i] = 1.0;

  if (n == 2) {
    // Player 1's indifference rows act on player 2's variables and vice
    // versa; the polynomials are linear so coefficients are the entries.
    auto block = [&](int player) {
      const int other = 1 - player;
      const int rows = static_cast<int>(support[player].size());
      const int cols = static_cast<int>(support[other].size());
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, cols);
      x.row(0).setOnes();
      int r = 1;
      for (size_t c = 0; c < sys.components.size(); ++c) {
        if (sys.info[c].player != player) continue;
        for (const Monomial& m : sys.components[c].terms)
          x(r, m.vars[0] - sys.offsets[other]) += m.coef;
        ++r;
      }
      return x;
    };
    sys.x1 = block(0);
    sys.x2 = block(1);
  }
  return sys;
}

Eigen::VectorXd CharacteristicSystem::Evaluate(const Eigen::VectorXd& p) const {
  Eigen::VectorXd out(components.size());
  for (size_t c = 0; c < components.size(); ++c)
    out[c] = components[c].Evaluate(p) - rhs[c];
  return out;
}

Eigen::MatrixXd CharacteristicSystem::Jacobian(const Eigen::VectorXd& p) const {
  Eigen::MatrixXd jac =
      Eigen::MatrixXd::Zero(components.size(), num_variables);
  for (size_t c = 0; c < components.size(); ++c)
    components[c].AddGradient(p, jac.row(c));
  return jac;
}

Eigen::VectorXd CharacteristicSystem::EvaluateResiduals(
    const Eigen::VectorXd& p) const {
  Eigen::VectorXd out(residuals.size());
  for (size_t c = 0; c < residuals.size(); ++c)
    out[c] = residuals[c].Evaluate(p);
  return out;
}

Eigen::VectorXd CharacteristicSystem::ToVariables(
    const MixedProfile& sigma) const {
  Eigen::VectorXd p(num_variables);
  for (int i = 0; i < num_players; ++i)
    for (size_t m = 0; m < support[i].size(); ++m)
      p[offsets[i] + m] = sigma[i][support[i][m]];
  return p;
}

MixedProfile CharacteristicSystem::ToProfile(const Game& game,
                                             const Eigen::VectorXd& p) const {
  MixedProfile sigma(num_players);
  for (int i = 0; i < num_players; ++i) {
    sigma[i].assign(game.num_actions(i), 0.0);
    for (size_t m = 0; m < support[i].size(); ++m)
      sigma[i][support[i][m]] = p[offsets[i] + m];
  }
  return sigma;
}

Eigen::MatrixXd CharacteristicSystem::BlockMatrix() const {
  if (num_players != 2) throw GameError("block form needs two players");
  const auto m1 = x2.cols(), m2 = x1.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m1 + m2, m1 + m2);
  out.block(0, 0, x2.rows(), m1) = x2;
  out.block(x2.rows(), m1, x1.rows(), m2) = x1;
  return out;
}

Eigen::VectorXd CharacteristicSystem::BlockRhs() const {
  if (num_players != 2) throw GameError("block form needs two players");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(num_variables);
  b[0] = 1.0;
  b[x2.rows()] = 1.0;
  return b;
}

double DeterminantTolerance(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1e-8;
  const double scale = m.cwiseAbs().maxCoeff();
  return 1e-8 * std::pow(scale, static_cast<double>(m.rows()));
}

}  // namespace cgames
