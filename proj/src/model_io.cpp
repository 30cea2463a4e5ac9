#include "tpd/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>
#include <zlib.h>

#include "config_json.hpp"
#include "tpd/error.hpp"

namespace tpd {

namespace {

constexpr char kMagic[8] = {'T', 'P', 'D', 'M', 'O', 'D', 'E', 'L'};

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  std::uint64_t u64() { return read<8>(); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(read<4>()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::string text(std::size_t len) {
    need(len);
    std::string s = bytes_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  std::size_t remaining() const { return end_ - pos_; }

 private:
  template <int N>
  std::uint64_t read() {
    need(N);
    std::uint64_t v = 0;
    for (int b = 0; b < N; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += N;
    return v;
  }

  void need(std::size_t n) const {
    if (end_ - pos_ < n) fail(ErrorKind::CorruptModel, "model file is truncated");
  }

  const std::string& bytes_;
  std::size_t pos_;
  std::size_t end_;
};

std::uint32_t checksum(const char* data, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (len > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    len -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

json bands_to_json(const PercentileBands& b) {
  return {{"lower_level", b.lower_level},
          {"upper_level", b.upper_level},
          {"lower", b.lower},
          {"upper", b.upper}};
}

PercentileBands bands_from_json(const json& j) {
  PercentileBands b;
  b.lower_level = j.at("lower_level").get<double>();
  b.upper_level = j.at("upper_level").get<double>();
  b.lower = j.at("lower").get<std::vector<double>>();
  b.upper = j.at("upper").get<std::vector<double>>();
  return b;
}

json branch_to_json(const std::optional<Branch>& b) {
  if (!b) return nullptr;
  return {{"columns", b->columns},
          {"threshold", std::bit_cast<std::uint64_t>(b->model.threshold)},
          {"contamination", b->model.contamination},
          {"bands", bands_to_json(b->bands)}};
}

std::optional<Branch> branch_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  Branch b;
  b.columns = j.at("columns").get<std::vector<std::string>>();
  b.model.threshold = std::bit_cast<double>(j.at("threshold").get<std::uint64_t>());
  b.model.contamination = j.at("contamination").get<double>();
  b.bands = bands_from_json(j.at("bands"));
  if (b.bands.lower.size() != b.columns.size() || b.bands.upper.size() != b.columns.size()) {
    fail(ErrorKind::CorruptModel, "band count does not match branch columns");
  }
  return b;
}

void put_dims(std::string& out, const std::optional<Branch>& b) {
  if (!b) return;
  for (const auto& dim : b->model.dims) {
    put_u64(out, dim.size());
    put_f64(out, dim.skewness());
    for (double v : dim.sorted_values()) put_f64(out, v);
  }
}

void read_dims(Reader& r, std::optional<Branch>& b) {
  if (!b) return;
  b->model.dims.clear();
  for (std::size_t j = 0; j < b->columns.size(); ++j) {
    const std::uint64_t n = r.u64();
    const double skew = r.f64();
    if (n == 0 || n > r.remaining() / 8) fail(ErrorKind::CorruptModel, "bad dimension length");
    std::vector<double> values(n);
    for (auto& v : values) v = r.f64();
    try {
      b->model.dims.push_back(FittedDimension::from_parts(std::move(values), skew));
    } catch (const Error& e) {
      fail(ErrorKind::CorruptModel, e.what());
    }
  }
}

}  // namespace

std::string serialize_model(const TpdModel& model) {
  json meta;
  meta["config"] = detail::config_to_json_value(model.config);
  json overrides = json::object();
  for (const auto& [name, kind] : model.schema.overrides) {
    overrides[name] = std::string(to_string(kind));
  }
  std::vector<std::string> kinds;
  for (auto k : model.schema.kinds) kinds.emplace_back(to_string(k));
  meta["schema"] = {{"names", model.schema.names},
                    {"kinds", kinds},
                    {"cardinality_limit", model.schema.cardinality_limit},
                    {"overrides", overrides}};
  meta["norm"] = {{"min", model.norm.min}, {"max", model.norm.max}};
  meta["training_rows"] = model.training_rows;
  meta["removed_rows"] = model.removed_rows;
  meta["discrete"] = branch_to_json(model.discrete);
  meta["continuous"] = branch_to_json(model.continuous);

  std::string payload;
  const std::string meta_text = meta.dump();
  put_u64(payload, meta_text.size());
  payload += meta_text;
  put_dims(payload, model.discrete);
  put_dims(payload, model.continuous);

  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kModelFormatVersion);
  put_u64(out, payload.size());
  out += payload;
  put_u32(out, checksum(payload.data(), payload.size()));
  return out;
}

TpdModel deserialize_model(const std::string& bytes) {
  constexpr std::size_t header = sizeof(kMagic) + 4 + 8;
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorKind::CorruptModel, "not a model file");
  }
  Reader head(bytes, sizeof(kMagic), header);
  const std::uint32_t version = head.u32();
  if (version != kModelFormatVersion) {
    fail(ErrorKind::CorruptModel, fmt::format("unsupported model version {} (expected {})",
                                              version, kModelFormatVersion));
  }
  const std::uint64_t payload_len = head.u64();
  if (bytes.size() - header < 4 || payload_len != bytes.size() - header - 4) {
    fail(ErrorKind::CorruptModel, "model file is truncated or has trailing bytes");
  }
  Reader trailer(bytes, header + payload_len, bytes.size());
  if (trailer.u32() != checksum(bytes.data() + header, payload_len)) {
    fail(ErrorKind::CorruptModel, "checksum mismatch");
  }

  Reader r(bytes, header, header + payload_len);
  TpdModel model;
  try {
    const std::uint64_t meta_len = r.u64();
    if (meta_len > r.remaining()) fail(ErrorKind::CorruptModel, "bad metadata length");
    const json meta = json::parse(r.text(meta_len));
    model.config = detail::config_from_json_value(meta.at("config"));
    const auto& s = meta.at("schema");
    model.schema.names = s.at("names").get<std::vector<std::string>>();
    for (const auto& k : s.at("kinds")) model.schema.kinds.push_back(parse_feature_kind(k.get<std::string>()));
    model.schema.cardinality_limit = s.at("cardinality_limit").get<std::size_t>();
    for (const auto& item : s.at("overrides").items()) {
      model.schema.overrides[item.key()] = parse_feature_kind(item.value().get<std::string>());
    }
    model.norm.min = meta.at("norm").at("min").get<std::vector<double>>();
    model.norm.max = meta.at("norm").at("max").get<std::vector<double>>();
    model.training_rows = meta.at("training_rows").get<std::size_t>();
    model.removed_rows = meta.at("removed_rows").get<std::size_t>();
    model.discrete = branch_from_json(meta.at("discrete"));
    model.continuous = branch_from_json(meta.at("continuous"));
  } catch (const json::exception& e) {
    fail(ErrorKind::CorruptModel, fmt::format("bad metadata: {}", e.what()));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptModel) throw;
    fail(ErrorKind::CorruptModel, e.what());
  }
  if (model.schema.kinds.size() != model.schema.names.size() ||
      (!model.discrete && !model.continuous)) {
    fail(ErrorKind::CorruptModel, "inconsistent schema");
  }
  if (model.continuous && model.norm.min.size() != model.continuous->columns.size()) {
    fail(ErrorKind::CorruptModel, "normalisation does not match continuous columns");
  }
  read_dims(r, model.discrete);
  read_dims(r, model.continuous);
  if (r.remaining() != 0) fail(ErrorKind::CorruptModel, "unexpected bytes after dimensions");
  return model;
}

void save_model(const TpdModel& model, const std::filesystem::path& path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, fmt::format("cannot write '{}'", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::InvalidInput, fmt::format("failed writing '{}'", path.string()));
}

TpdModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, fmt::format("cannot open model '{}'", path.string()));
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace tpd
