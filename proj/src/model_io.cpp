#include "graspdec/model_io.hpp"

#include "graspdec/riemann.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace graspdec {

namespace {

class PayloadWriter {
 public:
  void add(double v) { values_.push_back(v); }
  void add(const Mat& m) {
    for (int c = 0; c < m.cols(); ++c) {
      for (int r = 0; r < m.rows(); ++r) values_.push_back(m(r, c));
    }
  }
  void add(const Vec& v) {
    for (int i = 0; i < v.size(); ++i) values_.push_back(v[i]);
  }

  void write(std::ostream& out, const std::map<std::string, std::string>& header,
             const std::string& magic) const {
    out << magic << " v1\n";
    for (const auto& [key, value] : header) out << key << ": " << value << "\n";
    out << "payload: " << values_.size() << "\n";
    for (double v : values_) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      char raw[8];
      for (int i = 0; i < 8; ++i) raw[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(raw, 8);
    }
  }

 private:
  std::vector<double> values_;
};

struct ParsedFile {
  std::map<std::string, std::string> header;
  std::vector<double> payload;

  const std::string& get(const std::string& key) const {
    auto it = header.find(key);
    if (it == header.end()) {
      throw Error(Error::Code::bad_config, "model file missing header field: " + key);
    }
    return it->second;
  }
  int get_int(const std::string& key) const { return std::stoi(get(key)); }
  double get_double(const std::string& key) const { return std::stod(get(key)); }
};

ParsedFile parse_file(const std::string& path, const std::string& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Error::Code::io_failure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != magic + " v1") {
    throw Error(Error::Code::malformed_header, "bad magic in " + path);
  }
  ParsedFile file;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    const std::size_t colon = line.find(": ");
    if (colon == std::string::npos) {
      throw Error(Error::Code::malformed_header, "bad header line: " + line);
    }
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "payload") {
      count = std::stoul(value);
      break;
    }
    file.header[key] = value;
  }
  file.payload.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    char raw[8];
    if (!in.read(raw, 8)) {
      throw Error(Error::Code::malformed_header, "truncated payload in " + path);
    }
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(raw[b])) << (8 * b);
    }
    std::memcpy(&file.payload[i], &bits, 8);
  }
  return file;
}

class PayloadReader {
 public:
  explicit PayloadReader(const std::vector<double>& values) : values_(values) {}

  double next() {
    if (pos_ >= values_.size()) {
      throw Error(Error::Code::malformed_header, "payload shorter than expected");
    }
    return values_[pos_++];
  }
  Mat next_mat(int rows, int cols) {
    Mat m(rows, cols);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = next();
    }
    return m;
  }
  Vec next_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = next();
    return v;
  }
  void finish() const {
    if (pos_ != values_.size()) {
      throw Error(Error::Code::malformed_header, "payload longer than expected");
    }
  }

 private:
  const std::vector<double>& values_;
  std::size_t pos_{0};
};

std::string format_double(double v) {
  std::ostringstream oss;
  oss.precision(17);
  oss << v;
  return oss.str();
}

void write_to(const std::string& path, const PayloadWriter& writer,
              const std::map<std::string, std::string>& header, const std::string& magic) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Error::Code::unwritable_path, "cannot write " + path);
  writer.write(out, header, magic);
  if (!out) throw Error(Error::Code::unwritable_path, "write failed: " + path);
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  std::map<std::string, std::string> header;
  header["kind"] = model_kind_name(model.kind);
  header["pair"] = pair_name(model.pair);
  header["feature_dim"] = std::to_string(model.feature_dim);
  header["cost"] = format_double(model.spec.cost);
  header["tolerance"] = format_double(model.spec.tolerance);
  header["hidden"] = std::to_string(model.spec.hidden);
  header["max_epochs"] = std::to_string(model.spec.max_epochs);
  header["seed"] = std::to_string(model.spec.seed);

  PayloadWriter payload;
  switch (model.kind) {
    case ModelKind::lda:
      payload.add(model.lda_weights);
      payload.add(model.lda_bias);
      break;
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf:
    case ModelKind::ts_svm:
      header["n_sv"] = std::to_string(model.support_vectors.cols());
      payload.add(model.support_vectors);
      payload.add(model.dual_coefs);
      payload.add(model.svm_bias);
      payload.add(model.gamma_used);
      break;
    case ModelKind::mlp:
      payload.add(model.hidden_weights);
      payload.add(model.hidden_bias);
      payload.add(model.output_weights);
      payload.add(model.output_bias);
      break;
    case ModelKind::mdm:
      payload.add(model.mean_first);
      payload.add(model.mean_second);
      break;
  }
  write_to(path, payload, header, "graspdec-model");
}

TrainedModel load_model(const std::string& path) {
  const ParsedFile file = parse_file(path, "graspdec-model");
  TrainedModel model;
  model.kind = model_kind_from_name(file.get("kind"));
  model.pair = pair_from_name(file.get("pair"));
  model.feature_dim = file.get_int("feature_dim");
  model.spec.kind = model.kind;
  model.spec.cost = file.get_double("cost");
  model.spec.tolerance = file.get_double("tolerance");
  model.spec.hidden = file.get_int("hidden");
  model.spec.max_epochs = file.get_int("max_epochs");
  model.spec.seed = std::stoull(file.get("seed"));

  PayloadReader payload(file.payload);
  const int f = model.feature_dim;
  switch (model.kind) {
    case ModelKind::lda:
      model.lda_weights = payload.next_vec(f);
      model.lda_bias = payload.next();
      break;
    case ModelKind::svm_linear:
    case ModelKind::svm_rbf:
    case ModelKind::ts_svm: {
      const int n_sv = file.get_int("n_sv");
      model.support_vectors = payload.next_mat(f, n_sv);
      model.dual_coefs = payload.next_vec(n_sv);
      model.svm_bias = payload.next();
      model.gamma_used = payload.next();
      break;
    }
    case ModelKind::mlp: {
      const int h = model.spec.hidden;
      model.hidden_weights = payload.next_mat(h, f);
      model.hidden_bias = payload.next_vec(h);
      model.output_weights = payload.next_vec(h);
      model.output_bias = payload.next();
      break;
    }
    case ModelKind::mdm:
      model.mean_first = payload.next_mat(f, f);
      model.mean_second = payload.next_mat(f, f);
      model.log_mean_first = matrix_log(model.mean_first);
      model.log_mean_second = matrix_log(model.mean_second);
      break;
  }
  payload.finish();
  return model;
}

void save_csp_model(const CspModel& model, const std::string& path) {
  std::map<std::string, std::string> header;
  header["pair"] = pair_name(model.pair);
  header["n_channels"] = std::to_string(model.filters.rows());
  header["n_filters"] = std::to_string(model.filters.cols());
  PayloadWriter payload;
  payload.add(model.filters);
  for (double mu : model.eigenvalues) payload.add(mu);
  write_to(path, payload, header, "graspdec-csp");
}

CspModel load_csp_model(const std::string& path) {
  const ParsedFile file = parse_file(path, "graspdec-csp");
  CspModel model;
  model.pair = pair_from_name(file.get("pair"));
  const int e = file.get_int("n_channels");
  const int f = file.get_int("n_filters");
  PayloadReader payload(file.payload);
  model.filters = payload.next_mat(e, f);
  model.eigenvalues.resize(f);
  for (int i = 0; i < f; ++i) model.eigenvalues[i] = payload.next();
  payload.finish();
  return model;
}

void save_feature_matrix(const FeatureMatrix& features, const std::string& path) {
  std::map<std::string, std::string> header;
  header["n_features"] = std::to_string(features.values.rows());
  header["n_trials"] = std::to_string(features.values.cols());
  std::string labels;
  for (std::size_t i = 0; i < features.labels.size(); ++i) {
    if (i) labels += ",";
    labels += label_name(features.labels[i]);
  }
  header["labels"] = labels;
  PayloadWriter payload;
  payload.add(features.values);
  write_to(path, payload, header, "graspdec-features");
}

FeatureMatrix load_feature_matrix(const std::string& path) {
  const ParsedFile file = parse_file(path, "graspdec-features");
  FeatureMatrix features;
  const int f = file.get_int("n_features");
  const int n = file.get_int("n_trials");
  std::stringstream labels(file.get("labels"));
  std::string token;
  while (std::getline(labels, token, ',')) {
    if (!token.empty()) features.labels.push_back(label_from_name(token));
  }
  if (static_cast<int>(features.labels.size()) != n) {
    throw Error(Error::Code::malformed_header, "label count != n_trials in " + path);
  }
  PayloadReader payload(file.payload);
  features.values = payload.next_mat(f, n);
  payload.finish();
  return features;
}

}  // namespace graspdec
