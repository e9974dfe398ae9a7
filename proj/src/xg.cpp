#include "passval/xg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "passval/csv.hpp"

namespace passval {

ShotFeatures shot_features_at(PitchPoint p) {
  ShotFeatures f;
  f.x = p.x;
  f.y = p.y;
  const double dx = kGoalCenter.x - p.x;
  const double dy = kGoalCenter.y - p.y;
  f.dist = std::sqrt(dx * dx + dy * dy);

  // Angle between the two post vectors via atan2(|cross|, dot); stable for
  // near-collinear geometry. Exactly at a post one vector vanishes: angle 0.
  // Strictly between the posts the vectors oppose: angle pi.
  const double v1x = kGoalCenter.x - p.x;
  const double v1y = (kGoalCenter.y - kGoalHalfWidth) - p.y;
  const double v2x = kGoalCenter.x - p.x;
  const double v2y = (kGoalCenter.y + kGoalHalfWidth) - p.y;
  const double n1 = v1x * v1x + v1y * v1y;
  const double n2 = v2x * v2x + v2y * v2y;
  if (n1 == 0.0 || n2 == 0.0) {
    f.angle = 0.0;
  } else {
    const double cross = v1x * v2y - v1y * v2x;
    const double dot = v1x * v2x + v1y * v2y;
    f.angle = std::atan2(std::abs(cross), dot);
  }
  return f;
}

ShotFeatures shot_features(const Event& shot) {
  if (!shot.is_shot()) {
    throw ValidationError("shot_features requires a shot event");
  }
  return shot_features_at(shot.start);
}

double Tree::eval(const std::array<double, 4>& x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

double GbtModel::predict_margin(const std::array<double, 4>& x) const {
  double m = base_score;
  for (const Tree& t : trees) m += shrinkage * t.eval(x);
  return m;
}

double GbtModel::predict(const std::array<double, 4>& x) const {
  return sigmoid(predict_margin(x));
}

namespace {

constexpr int kNumFeatures = 4;
constexpr double kMinSplitGain = 1e-12;

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct NodeAgg {
  double g = 0.0;
  double h = 0.0;
};

struct ScanState {
  double run_g = 0.0;
  double run_h = 0.0;
  double prev_value = 0.0;
  bool has_prev = false;
};

// One boosting round: level-wise exact greedy over presorted feature orders.
Tree build_tree(const std::vector<std::array<double, 4>>& x,
                const std::vector<double>& grad,
                const std::vector<double>& hess,
                const std::array<std::vector<std::uint32_t>, 4>& order,
                const GbtParams& params, std::vector<int>& node_of,
                std::vector<double>& out) {
  const std::size_t n = x.size();
  Tree tree;
  tree.nodes.push_back(TreeNode{});

  std::fill(node_of.begin(), node_of.end(), 0);
  std::vector<NodeAgg> agg(1);
  for (std::size_t i = 0; i < n; ++i) {
    agg[0].g += grad[i];
    agg[0].h += hess[i];
  }

  std::vector<int> frontier = {0};
  for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    std::vector<SplitChoice> best(frontier.size());
    std::vector<int> slot_of_node(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      slot_of_node[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
    }

    std::vector<ScanState> scan(frontier.size());
    for (int f = 0; f < kNumFeatures; ++f) {
      std::fill(scan.begin(), scan.end(), ScanState{});
      for (std::uint32_t idx : order[static_cast<std::size_t>(f)]) {
        const int node = node_of[idx];
        const int slot = slot_of_node[static_cast<std::size_t>(node)];
        if (slot < 0) continue;
        ScanState& st = scan[static_cast<std::size_t>(slot)];
        const double v = x[idx][static_cast<std::size_t>(f)];
        if (st.has_prev && v > st.prev_value) {
          const NodeAgg& tot = agg[static_cast<std::size_t>(node)];
          const double hl = st.run_h;
          const double hr = tot.h - hl;
          if (hl >= params.min_child_hessian && hr >= params.min_child_hessian) {
            const double gl = st.run_g;
            const double gr = tot.g - gl;
            const double gain =
                gl * gl / hl + gr * gr / hr - tot.g * tot.g / tot.h;
            // Strict > keeps the first candidate on ties; features and
            // thresholds are visited in ascending order.
            if (gain > best[static_cast<std::size_t>(slot)].gain &&
                gain > kMinSplitGain) {
              best[static_cast<std::size_t>(slot)] =
                  SplitChoice{gain, f, 0.5 * (st.prev_value + v)};
            }
          }
        }
        st.run_g += grad[idx];
        st.run_h += hess[idx];
        st.prev_value = v;
        st.has_prev = true;
      }
    }

    std::vector<int> next_frontier;
    std::vector<NodeAgg> next_agg(tree.nodes.size() + 2 * frontier.size());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) next_agg[i] = agg[i];
    bool any_split = false;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      const int node = frontier[s];
      if (best[s].feature < 0) continue;
      any_split = true;
      TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
      nd.feature = best[s].feature;
      nd.threshold = best[s].threshold;
      nd.left = static_cast<int>(tree.nodes.size());
      nd.right = nd.left + 1;
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      next_frontier.push_back(nd.left);
      next_frontier.push_back(nd.right);
    }
    next_agg.resize(tree.nodes.size());

    if (any_split) {
      for (std::size_t i = 0; i < n; ++i) {
        const int node = node_of[i];
        const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
        if (nd.feature < 0) continue;
        const int child = x[i][static_cast<std::size_t>(nd.feature)] <= nd.threshold
                              ? nd.left
                              : nd.right;
        node_of[i] = child;
        next_agg[static_cast<std::size_t>(child)].g += grad[i];
        next_agg[static_cast<std::size_t>(child)].h += hess[i];
      }
    }
    agg = std::move(next_agg);
    frontier = std::move(next_frontier);
    if (!any_split) break;
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode& nd = tree.nodes[i];
    if (nd.feature >= 0) continue;
    nd.value = agg[i].h > 0.0 ? -agg[i].g / agg[i].h : 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = tree.nodes[static_cast<std::size_t>(node_of[i])].value;
  }
  return tree;
}

}  // namespace

GbtModel train_gbt(std::span<const LabeledShot> shots, const GbtParams& params) {
  const std::size_t n = shots.size();
  std::size_t positives = 0;
  for (const auto& s : shots) positives += s.goal ? 1 : 0;
  if (n == 0 || positives == 0 || positives == n) {
    throw ValidationError(
        "training requires at least one positive and one negative example");
  }

  std::vector<std::array<double, 4>> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = shots[i].features.as_array();
    y[i] = shots[i].goal ? 1.0 : 0.0;
  }

  const double base_rate = static_cast<double>(positives) / static_cast<double>(n);
  GbtModel model;
  model.base_score = std::log(base_rate / (1.0 - base_rate));
  model.shrinkage = params.shrinkage;

  std::array<std::vector<std::uint32_t>, 4> order;
  for (int f = 0; f < kNumFeatures; ++f) {
    auto& ord = order[static_cast<std::size_t>(f)];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0u);
    std::sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
      const double va = x[a][static_cast<std::size_t>(f)];
      const double vb = x[b][static_cast<std::size_t>(f)];
      if (va != vb) return va < vb;
      return a < b;
    });
  }

  std::vector<double> margin(n, model.base_score);
  std::vector<double> grad(n), hess(n), out(n);
  std::vector<int> node_of(n, 0);
  model.trees.reserve(static_cast<std::size_t>(params.rounds));
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree = build_tree(x, grad, hess, order, params, node_of, out);
    for (std::size_t i = 0; i < n; ++i) margin[i] += params.shrinkage * out[i];
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double XgModel::predict_event(const Event& shot) const {
  if (shot.subkind == EventSubkind::Penalty) return penalty_rate;
  return predict(shot_features(shot));
}

XgModel train_xg(std::span<const Event> shots, const GbtParams& params) {
  std::vector<LabeledShot> labeled;
  labeled.reserve(shots.size());
  std::size_t penalties = 0;
  std::size_t penalty_goals = 0;
  for (const auto& e : shots) {
    if (!e.is_shot()) {
      throw ValidationError("train_xg given a non-shot event");
    }
    if (e.subkind == EventSubkind::Penalty) {
      ++penalties;
      penalty_goals += e.is_goal() ? 1 : 0;
      continue;
    }
    labeled.push_back(LabeledShot{shot_features(e), e.is_goal()});
  }
  XgModel model;
  model.gbt = train_gbt(labeled, params);
  model.base_rate = sigmoid(model.gbt.base_score);
  model.penalty_rate =
      penalties > 0
          ? static_cast<double>(penalty_goals) / static_cast<double>(penalties)
          : kPenaltyFallbackRate;
  return model;
}

std::string xg_to_text(const XgModel& model) {
  std::ostringstream os;
  os << "passval-xg v1\n";
  os << "base_score " << csv::fmt(model.gbt.base_score) << '\n';
  os << "shrinkage " << csv::fmt(model.gbt.shrinkage) << '\n';
  os << "penalty_rate " << csv::fmt(model.penalty_rate) << '\n';
  os << "base_rate " << csv::fmt(model.base_rate) << '\n';
  os << "trees " << model.gbt.trees.size() << '\n';
  for (const Tree& t : model.gbt.trees) {
    os << "tree " << t.nodes.size() << '\n';
    for (const TreeNode& n : t.nodes) {
      if (n.feature >= 0) {
        os << "s " << n.feature << ' ' << csv::fmt(n.threshold) << ' ' << n.left
           << ' ' << n.right << '\n';
      } else {
        os << "l " << csv::fmt(n.value) << '\n';
      }
    }
  }
  return os.str();
}

namespace {

std::vector<std::string> next_tokens(std::istringstream& in,
                                     const char* expect_tag) {
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (expect_tag && tokens[0] != expect_tag) {
      throw ValidationError("xg model: expected '" + std::string(expect_tag) +
                            "', got '" + tokens[0] + "'");
    }
    return tokens;
  }
  throw ValidationError("xg model: unexpected end of input");
}

double parse_double_tok(const std::string& s) {
  auto v = csv::to_double(s);
  if (!v) throw ValidationError("xg model: bad number '" + s + "'");
  return *v;
}

}  // namespace

XgModel xg_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  std::getline(in, header);
  if (header != "passval-xg v1") {
    throw ValidationError("xg model: unsupported format header");
  }
  XgModel model;
  model.gbt.base_score = parse_double_tok(next_tokens(in, "base_score").at(1));
  model.gbt.shrinkage = parse_double_tok(next_tokens(in, "shrinkage").at(1));
  model.penalty_rate = parse_double_tok(next_tokens(in, "penalty_rate").at(1));
  model.base_rate = parse_double_tok(next_tokens(in, "base_rate").at(1));
  const auto n_trees = std::stoul(next_tokens(in, "trees").at(1));
  model.gbt.trees.resize(n_trees);
  for (auto& tree : model.gbt.trees) {
    const auto n_nodes = std::stoul(next_tokens(in, "tree").at(1));
    tree.nodes.resize(n_nodes);
    for (auto& node : tree.nodes) {
      auto tokens = next_tokens(in, nullptr);
      if (tokens[0] == "s") {
        node.feature = std::stoi(tokens.at(1));
        node.threshold = parse_double_tok(tokens.at(2));
        node.left = std::stoi(tokens.at(3));
        node.right = std::stoi(tokens.at(4));
      } else if (tokens[0] == "l") {
        node.feature = -1;
        node.value = parse_double_tok(tokens.at(1));
      } else {
        throw ValidationError("xg model: bad node tag '" + tokens[0] + "'");
      }
    }
  }
  return model;
}

void save_xg(const std::string& path, const XgModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  out << xg_to_text(model);
}

XgModel load_xg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return xg_from_text(buf.str());
}

}  // namespace passval
