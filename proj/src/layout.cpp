#include "graspdec/layout.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace graspdec {

namespace {

using json = nlohmann::json;

const std::vector<std::string>& acticap63_names() {
  static const std::vector<std::string> names = {
      "Fp1", "Fp2", "AF7", "AF3", "AF4", "AF8",
      "F7",  "F5",  "F3",  "F1",  "Fz",  "F2",  "F4",  "F6",  "F8",
      "FT9", "FT7", "FC5", "FC3", "FC1", "FC2", "FC4", "FC6", "FT8", "FT10",
      "T7",  "C5",  "C3",  "C1",  "C2",  "C4",  "C6",  "T8",
      "TP9", "TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6", "TP8", "TP10",
      "P7",  "P5",  "P3",  "P1",  "Pz",  "P2",  "P4",  "P6",  "P8",
      "PO9", "PO7", "PO3", "POz", "PO4", "PO8", "PO10",
      "O1",  "Oz",  "O2"};
  return names;
}

const std::vector<std::string>& openbci16_names() {
  static const std::vector<std::string> names = {
      "Fp1", "Fp2", "F7", "F3", "F4", "F8", "T7", "C3",
      "C4",  "T8",  "P7", "P3", "P4", "P8", "O1", "O2"};
  return names;
}

// Mirror a 10-20 name across the midline (odd <-> even digit suffix).
std::string mirror_name(const std::string& name) {
  std::string out = name;
  std::size_t i = out.find_first_of("0123456789");
  if (i == std::string::npos) return out;  // midline (z) electrodes
  int num = std::stoi(out.substr(i));
  num += (num % 2 == 1) ? 1 : -1;
  return out.substr(0, i) + std::to_string(num);
}

std::vector<std::string> mirror_all(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(mirror_name(n));
  return out;
}

CombinationSpec lateral(int id, std::vector<std::string> right) {
  CombinationSpec c;
  c.id = id;
  c.members_left = mirror_all(right);
  c.members_right = std::move(right);
  return c;
}

CombinationSpec symmetric(int id, std::vector<std::string> members) {
  CombinationSpec c;
  c.id = id;
  c.members_right = members;
  c.members_left = std::move(members);
  return c;
}

}  // namespace

ElectrodeLayout builtin_layout(const std::string& name) {
  ElectrodeLayout layout;
  layout.name = name;
  if (name == "acticap63") {
    layout.names = acticap63_names();
    return layout;
  }
  if (name == "openbci16") {
    layout.names = openbci16_names();
    return layout;
  }
  throw Error(Error::Code::bad_config, "unknown built-in layout: " + name);
}

std::vector<CombinationSpec> builtin_combinations() {
  std::vector<CombinationSpec> combos;
  combos.push_back(symmetric(0, acticap63_names()));
  combos.push_back(symmetric(1, {"F3",  "F1",  "Fz",  "F2",  "F4",
                                 "FT7", "FC5", "FC3", "FC1", "FC2", "FC4", "FC6", "FT8",
                                 "T7",  "C5",  "C3",  "C1",  "C2",  "C4",  "C6",  "T8",
                                 "TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6", "TP8",
                                 "P3",  "Pz"}));
  combos.push_back(lateral(2, {"F5", "F3", "FT7", "FC5", "FC3", "FC1", "T7", "C5", "C3", "C1",
                               "TP7", "CP5", "CP3", "CP1", "P5", "P3"}));
  combos.push_back(lateral(3, {"F3", "FC5", "FC3", "FC1", "C5", "C3", "C1", "CP5", "CP3", "CP1"}));
  combos.push_back(lateral(4, {"FC3", "FC1", "C5", "C3", "C1", "CP3"}));
  combos.push_back(lateral(5, {"FC3", "C3", "CP3"}));
  combos.push_back(symmetric(6, {"P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8",
                                 "PO9", "PO7", "PO3", "POz", "PO4", "PO8", "PO10",
                                 "O1", "Oz", "O2"}));
  combos.push_back(symmetric(7, {"Fp1", "Fp2", "AF7", "AF3", "AF4", "AF8",
                                 "F7", "F5", "F3", "F1", "Fz", "F2", "F4", "F6", "F8"}));
  combos.push_back(lateral(8, {"Fp1", "AF7", "AF3", "F7", "F5", "F3", "F1"}));
  combos.push_back(symmetric(9, openbci16_names()));
  return combos;
}

LayoutFile load_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Error::Code::io_failure, "cannot open layout file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Error::Code::bad_config, "layout file is not valid JSON: " + std::string(e.what()));
  }
  LayoutFile file;
  try {
    for (const auto& [name, body] : j.at("layouts").items()) {
      ElectrodeLayout layout;
      layout.name = name;
      layout.names = body.at("names").get<std::vector<std::string>>();
      if (body.contains("positions")) {
        for (const auto& p : body["positions"]) {
          layout.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        }
        if (layout.positions.size() != layout.names.size()) {
          throw Error(Error::Code::bad_config,
                      "layout " + name + ": positions count != names count");
        }
      }
      std::unordered_set<std::string> seen(layout.names.begin(), layout.names.end());
      if (seen.size() != layout.names.size()) {
        throw Error(Error::Code::bad_config, "layout " + name + " has duplicate channel names");
      }
      file.layouts.push_back(std::move(layout));
    }
    for (const auto& c : j.at("combinations")) {
      CombinationSpec spec;
      spec.id = c.at("id").get<int>();
      spec.members_right = c.at("right").get<std::vector<std::string>>();
      spec.members_left = c.at("left").get<std::vector<std::string>>();
      file.combinations.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(Error::Code::bad_config, "layout file schema error: " + std::string(e.what()));
  }
  return file;
}

void save_layout_file(const LayoutFile& file, const std::string& path) {
  json j;
  j["layouts"] = json::object();
  for (const auto& layout : file.layouts) {
    json body;
    body["names"] = layout.names;
    if (!layout.positions.empty()) {
      json pos = json::array();
      for (const auto& [x, y] : layout.positions) pos.push_back({x, y});
      body["positions"] = pos;
    }
    j["layouts"][layout.name] = body;
  }
  j["combinations"] = json::array();
  for (const auto& c : file.combinations) {
    j["combinations"].push_back({{"id", c.id}, {"right", c.members_right}, {"left", c.members_left}});
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(Error::Code::unwritable_path, "cannot open for writing: " + path);
  }
  out << j.dump(2) << "\n";
}

std::vector<std::string> resolve_combination(const ElectrodeLayout& layout,
                                             const CombinationSpec& combo,
                                             Handedness handedness) {
  const std::vector<std::string>& members =
      handedness == Handedness::right ? combo.members_right : combo.members_left;
  std::unordered_set<std::string> wanted(members.begin(), members.end());
  for (const auto& m : members) {
    if (std::find(layout.names.begin(), layout.names.end(), m) == layout.names.end()) {
      throw Error(Error::Code::unknown_channel,
                  "combination " + std::to_string(combo.id) + " member not in layout: " + m);
    }
  }
  std::vector<std::string> out;
  out.reserve(members.size());
  for (const auto& name : layout.names) {
    if (wanted.count(name)) out.push_back(name);
  }
  return out;
}

EpochSet select_electrodes(const EpochSet& set, const std::vector<std::string>& names) {
  std::unordered_map<std::string, int> index;
  for (int c = 0; c < set.n_channels(); ++c) index[set.channels[c]] = c;
  std::vector<int> rows;
  rows.reserve(names.size());
  for (const auto& name : names) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw Error(Error::Code::unknown_channel, "channel not in set: " + name);
    }
    rows.push_back(it->second);
  }
  EpochSet out;
  out.sample_rate = set.sample_rate;
  out.meta = set.meta;
  out.channels = names;
  out.labels = set.labels;
  out.data.reserve(set.data.size());
  for (const Mat& trial : set.data) {
    Mat sel(static_cast<int>(rows.size()), trial.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) sel.row(static_cast<int>(r)) = trial.row(rows[r]);
    out.data.push_back(std::move(sel));
  }
  return out;
}

}  // namespace graspdec
