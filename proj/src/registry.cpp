#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lsbw/errors.hpp"
#include "lsbw/mixtures.hpp"

namespace lsbw {
namespace {

struct BivariateRow {
  const char* id;
  double weight;
  double mu1, mu2;
  double sd1, sd2;
  double rho;
};

// Bivariate normal mixtures (A)-(L) of Wand & Jones (1993), "Comparison of
// smoothing parameterizations in bivariate kernel density estimation".
// External provenance: transcribed for convenience and not cross-checked
// against the original table; nothing in the test suite depends on them.
constexpr double kTwoThirds = 2.0 / 3.0;
constexpr double kThreeFifths = 3.0 / 5.0;
constexpr double kSevenTenths = 7.0 / 10.0;
constexpr std::array kWandJones = {
    BivariateRow{"A", 1.0, 0.0, 0.0, 0.5, 1.0, 0.0},
    BivariateRow{"B", 1.0, 0.0, 0.0, 1.0, 1.0, 0.7},
    BivariateRow{"C", 0.2, 0.0, 0.0, 1.0, 1.0, 0.0},
    BivariateRow{"C", 0.2, 0.5, 0.5, kTwoThirds, kTwoThirds, 0.0},
    BivariateRow{"C", 0.6, 13.0 / 12.0, 13.0 / 12.0, 5.0 / 9.0, 5.0 / 9.0, 0.0},
    BivariateRow{"D", kTwoThirds, 0.0, 0.0, 1.0, 1.0, 0.5},
    BivariateRow{"D", 1.0 / 3.0, 0.0, 0.0, kTwoThirds, kTwoThirds, -0.5},
    BivariateRow{"E", 0.5, -1.0, 0.0, kTwoThirds, kTwoThirds, 0.0},
    BivariateRow{"E", 0.5, 1.0, 0.0, kTwoThirds, kTwoThirds, 0.0},
    BivariateRow{"F", 0.5, -1.5, 0.0, 0.5, 1.0, 0.0},
    BivariateRow{"F", 0.5, 1.5, 0.0, 0.5, 1.0, 0.0},
    BivariateRow{"G", 0.5, -1.0, 1.0, kTwoThirds, kTwoThirds, kThreeFifths},
    BivariateRow{"G", 0.5, 1.0, -1.0, kTwoThirds, kTwoThirds, kThreeFifths},
    BivariateRow{"H", 0.5, 1.0, -1.0, kTwoThirds, kTwoThirds, kSevenTenths},
    BivariateRow{"H", 0.5, -1.0, 1.0, kTwoThirds, kTwoThirds, 0.0},
    BivariateRow{"I", 9.0 / 20.0, -1.2, 1.2, kThreeFifths, kThreeFifths, 0.3},
    BivariateRow{"I", 9.0 / 20.0, 1.2, -1.2, kThreeFifths, kThreeFifths, -0.6},
    BivariateRow{"I", 1.0 / 10.0, 0.0, 0.0, 0.25, 0.25, 0.2},
    BivariateRow{"J", 3.0 / 7.0, -1.0, 0.0, kThreeFifths, kSevenTenths, kThreeFifths},
    BivariateRow{"J", 3.0 / 7.0, 1.0, 1.1547005383792515, kThreeFifths, kSevenTenths, 0.0},
    BivariateRow{"J", 1.0 / 7.0, 1.0, -1.1547005383792515, kThreeFifths, kSevenTenths, 0.0},
    BivariateRow{"K", 1.0 / 3.0, -1.0, 0.0, kThreeFifths, kThreeFifths, 0.0},
    BivariateRow{"K", 1.0 / 3.0, 1.0, 0.0, kThreeFifths, kThreeFifths, 0.0},
    BivariateRow{"K", 1.0 / 3.0, 0.0, 1.7320508075688772, kThreeFifths, kThreeFifths, 0.0},
    BivariateRow{"L", 1.0 / 8.0, -1.0, -1.0, kTwoThirds, kTwoThirds, 0.4},
    BivariateRow{"L", 3.0 / 8.0, -1.0, 1.0, kTwoThirds, kTwoThirds, kThreeFifths},
    BivariateRow{"L", 1.0 / 8.0, 1.0, -1.0, kTwoThirds, kTwoThirds, -kSevenTenths},
    BivariateRow{"L", 3.0 / 8.0, 1.0, 1.0, kTwoThirds, kTwoThirds, -0.5},
};

MixtureComponent bivariate(double w, double mu1, double mu2, double sd1, double sd2, double rho) {
  MixtureComponent c;
  c.weight = w;
  c.mean = Eigen::Vector2d(mu1, mu2);
  c.cov.resize(2, 2);
  c.cov << sd1 * sd1, rho * sd1 * sd2, rho * sd1 * sd2, sd2 * sd2;
  return c;
}

MixtureModel model_m13() {
  // Sharp-peaked analog of the univariate kurtotic density:
  // 2/3 N(0, diag(1/4, 1)) + 1/3 N(0, diag(1/4, 1) / 50).
  return MixtureModel({bivariate(2.0 / 3.0, 0.0, 0.0, 0.5, 1.0, 0.0),
                       bivariate(1.0 / 3.0, 0.0, 0.0, 0.5 / std::sqrt(50.0),
                                 1.0 / std::sqrt(50.0), 0.0)});
}

MixtureModel standard_normal(std::size_t d) {
  MixtureComponent c;
  c.weight = 1.0;
  c.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  c.cov = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  return MixtureModel({c});
}

}  // namespace

MixtureModel model_by_id(const std::string& id) {
  if (id == "M13") return model_m13();
  if (id == "normal-d1") return standard_normal(1);
  if (id == "normal-d2") return standard_normal(2);
  std::vector<MixtureComponent> comps;
  for (const auto& row : kWandJones)
    if (id == row.id) comps.push_back(bivariate(row.weight, row.mu1, row.mu2, row.sd1, row.sd2, row.rho));
  if (comps.empty()) throw ArgumentError("unknown model id '" + id + "'");
  return MixtureModel(std::move(comps));
}

std::vector<std::string> registry_ids() {
  std::vector<std::string> ids = {"M13", "normal-d1", "normal-d2"};
  for (char c = 'A'; c <= 'L'; ++c) ids.emplace_back(1, c);
  return ids;
}

MixtureModel parse_mixture_json(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("mixture config: ") + e.what());
  }
  if (!doc.contains("components") || !doc["components"].is_array())
    throw ArgumentError("mixture config: missing 'components' array");
  std::vector<MixtureComponent> comps;
  try {
    for (const auto& jc : doc["components"]) {
      MixtureComponent c;
      c.weight = jc.at("weight").get<double>();
      const auto mean = jc.at("mean").get<std::vector<double>>();
      const auto cov = jc.at("cov").get<std::vector<std::vector<double>>>();
      const auto d = static_cast<Eigen::Index>(mean.size());
      c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), d);
      if (static_cast<Eigen::Index>(cov.size()) != d)
        throw ArgumentError("mixture config: covariance has wrong number of rows");
      c.cov.resize(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (static_cast<Eigen::Index>(cov[static_cast<std::size_t>(r)].size()) != d)
          throw ArgumentError("mixture config: covariance row has wrong length");
        for (Eigen::Index k = 0; k < d; ++k) c.cov(r, k) = cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      }
      comps.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("mixture config: ") + e.what());
  }
  if (doc.contains("dim") && comps.size() > 0 &&
      doc["dim"].get<std::size_t>() != static_cast<std::size_t>(comps.front().mean.size()))
    throw ArgumentError("mixture config: 'dim' disagrees with component means");
  return MixtureModel(std::move(comps));
}

MixtureModel load_mixture_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open mixture config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mixture_json(ss.str());
}

MixtureModel resolve_model(const std::string& id_or_path) {
  for (const auto& id : registry_ids())
    if (id == id_or_path) return model_by_id(id);
  if (std::filesystem::exists(id_or_path)) return load_mixture_config(id_or_path);
  throw ArgumentError("unknown model id or config path '" + id_or_path + "'");
}

}  // namespace lsbw
