#include "srforge/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "srforge/config_io.hpp"

namespace srforge {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'S', 'R', 'F', 'G'};

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void record(const std::string& name, const std::vector<std::int64_t>& dims, const Tensor& t) {
    str(name);
    u8(static_cast<std::uint8_t>(dims.size()));
    for (auto d : dims) u32(static_cast<std::uint32_t>(d));
    raw(t.data().data(), t.data().size() * sizeof(float));
  }

  std::vector<std::uint8_t> bytes;
};

class Parser {
 public:
  explicit Parser(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  void take(void* dst, std::size_t n, const std::string& section) {
    ensure(n, section);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8(const std::string& section) {
    std::uint8_t v;
    take(&v, 1, section);
    return v;
  }
  std::uint32_t u32(const std::string& section) {
    std::uint32_t v;
    take(&v, 4, section);
    return v;
  }
  std::string str(const std::string& section) {
    const std::uint32_t n = u32(section + " length");
    std::string s(n, '\0');
    take(s.data(), n, section);
    return s;
  }
  void ensure(std::size_t n, const std::string& section) const {
    if (pos_ + n > bytes_.size()) {
      throw FormatError("checkpoint truncated: missing " + section + " at byte offset " +
                        std::to_string(pos_) + " (need " + std::to_string(n) + " bytes, " +
                        std::to_string(bytes_.size() - pos_) + " left)");
    }
  }
  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

Shape dims_to_shape(const std::vector<std::int64_t>& dims) {
  if (dims.size() == 1) return {dims[0], 1, 1, 1};
  if (dims.size() == 4) return {dims[0], dims[1], dims[2], dims[3]};
  throw FormatError("unsupported tensor rank " + std::to_string(dims.size()));
}

NamedParam detached(const NamedParam& p) {
  return {p.name, p.dims, Tensor(p.value.shape(), p.value.values())};
}

}  // namespace

Checkpoint Checkpoint::capture(const Model& model, const AdamState& moments, std::int64_t step) {
  Checkpoint c;
  c.config = model.config();
  for (const auto& p : model.parameters()) c.params.push_back(detached(p));
  c.moments = moments;
  c.step = step;
  return c;
}

const NamedParam* Checkpoint::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Model Checkpoint::restore() const {
  Model m = build_model(config, 0);
  if (m.parameters().size() != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(params.size()) + " parameters, model has " +
                      std::to_string(m.parameters().size()));
  }
  for (const auto& p : params) {
    if (!m.has_parameter(p.name)) throw FormatError("checkpoint parameter " + p.name + " not in model");
    NamedParam& dst = m.parameter(p.name);
    if (dst.dims != p.dims) throw FormatError("checkpoint parameter " + p.name + " has the wrong shape");
    dst.value = Tensor(dst.value.shape(), p.value.values());
  }
  return m;
}

std::vector<std::uint8_t> serialize(const Checkpoint& ckpt) {
  nlohmann::json adam_steps = nlohmann::json::object();
  for (const auto& [name, mom] : ckpt.moments) adam_steps[name] = mom.t;
  const nlohmann::json header{{"model", to_json(ckpt.config)},
                              {"step", ckpt.step},
                              {"records", ckpt.params.size() + 2 * ckpt.moments.size()},
                              {"adam_steps", adam_steps}};
  Writer w;
  w.raw(kMagic, 4);
  w.u32(ckpt.version);
  w.str(header.dump());
  for (const auto& p : ckpt.params) w.record(p.name, p.dims, p.value);
  for (const auto& p : ckpt.params) {
    auto it = ckpt.moments.find(p.name);
    if (it == ckpt.moments.end()) continue;
    w.record(p.name + "/m", p.dims, it->second.m);
    w.record(p.name + "/v", p.dims, it->second.v);
  }
  return std::move(w.bytes);
}

Checkpoint deserialize(const std::vector<std::uint8_t>& bytes) {
  Parser in(bytes);
  char magic[4];
  in.take(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic at byte offset 0: not a checkpoint");
  Checkpoint c;
  c.version = in.u32("format version");
  if (c.version != Checkpoint::kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(c.version) + " at byte offset 4");
  }
  const std::size_t header_at = in.offset();
  nlohmann::json header;
  std::size_t records = 0;
  nlohmann::json adam_steps;
  try {
    header = nlohmann::json::parse(in.str("config header"));
    c.config = model_config_from_json(header.at("model"));
    c.step = header.at("step").get<std::int64_t>();
    records = header.at("records").get<std::size_t>();
    adam_steps = header.at("adam_steps");
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError("invalid config header at byte offset " + std::to_string(header_at) + ": " + e.what());
  }

  // Expected names come from the architecture the header declares.
  const Model reference = build_model(c.config, 0);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records; ++i) {
    const std::string section = "record " + std::to_string(i + 1) + " of " + std::to_string(records);
    const std::size_t at = in.offset();
    const std::string name = in.str(section + " name");
    const std::uint8_t rank = in.u8(section + " (" + name + ") rank");
    std::vector<std::int64_t> dims(rank);
    for (auto& d : dims) d = in.u32(section + " (" + name + ") dims");
    const Shape shape = dims_to_shape(dims);
    in.ensure(static_cast<std::size_t>(shape.numel()) * sizeof(float), section + " (" + name + ") data");
    std::vector<float> data(static_cast<std::size_t>(shape.numel()));
    in.take(data.data(), data.size() * sizeof(float), section + " (" + name + ") data");
    if (!seen.insert(name).second) {
      throw FormatError("duplicate record " + name + " at byte offset " + std::to_string(at));
    }

    std::string base = name;
    char moment = 0;
    if (name.size() > 2 && name[name.size() - 2] == '/') {
      moment = name.back();
      base = name.substr(0, name.size() - 2);
    }
    if (!reference.has_parameter(base) || (moment != 0 && moment != 'm' && moment != 'v')) {
      throw FormatError("unknown record " + name + " at byte offset " + std::to_string(at));
    }
    if (reference.parameter(base).dims != dims) {
      throw FormatError("record " + name + " has shape inconsistent with the config at byte offset " +
                        std::to_string(at));
    }
    Tensor t(shape, std::move(data));
    if (moment == 0) {
      c.params.push_back({name, dims, std::move(t)});
    } else {
      AdamMoments& mom = c.moments[base];
      (moment == 'm' ? mom.m : mom.v) = std::move(t);
      if (!adam_steps.contains(base)) {
        throw FormatError("moment " + name + " has no step count in the header");
      }
      mom.t = adam_steps.at(base).get<std::int64_t>();
    }
  }
  if (!in.done()) {
    throw FormatError("trailing bytes after the last record at byte offset " + std::to_string(in.offset()));
  }
  for (const auto& p : reference.parameters()) {
    if (!seen.count(p.name)) throw FormatError("checkpoint is missing parameter " + p.name);
  }
  for (const auto& [name, mom] : c.moments) {
    if (mom.m.empty() || mom.v.empty()) throw FormatError("incomplete Adam moments for " + name);
  }
  // Keep model order regardless of record order.
  std::vector<NamedParam> ordered;
  for (const auto& p : reference.parameters()) {
    for (auto& q : c.params) {
      if (q.name == p.name) ordered.push_back(std::move(q));
    }
  }
  c.params = std::move(ordered);
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize(ckpt);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

TransferReport transfer_from(Model& target, const Checkpoint& source) {
  const ModelConfig& tc = target.config();
  const ModelConfig& sc = source.config;
  if (tc.num_blocks != sc.num_blocks || tc.num_feats != sc.num_feats) {
    std::string first = "(none)";
    for (const auto& p : target.parameters()) {
      const NamedParam* s = source.find(p.name);
      if (s && s->dims != p.dims) {
        auto fmt = [](const std::vector<std::int64_t>& d) {
          std::string out = "(";
          for (std::size_t i = 0; i < d.size(); ++i) out += (i ? ", " : "") + std::to_string(d[i]);
          return out + ")";
        };
        first = p.name + " source " + fmt(s->dims) + " vs target " + fmt(p.dims);
        break;
      }
    }
    throw TransferError("transfer needs equal B and F (source B=" + std::to_string(sc.num_blocks) +
                        " F=" + std::to_string(sc.num_feats) + ", target B=" + std::to_string(tc.num_blocks) +
                        " F=" + std::to_string(tc.num_feats) + "); first offending shape: " + first);
  }
  TransferReport report;
  for (auto& p : target.parameters()) {
    const NamedParam* s = source.find(p.name);
    if (s && s->dims == p.dims) {
      p.value = Tensor(p.value.shape(), s->value.values());
      report.copied.push_back(p.name);
    } else {
      report.skipped.push_back(p.name);
    }
  }
  return report;
}

}  // namespace srforge
