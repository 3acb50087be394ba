#include "sgvi/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "sgvi/csv.hpp"
#include "sgvi/error.hpp"

namespace sgvi {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'V', 'I', 'C', 'K', 'P', 'T'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return v;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json shape_json(const ModelShape& s) {
  return {{"feature_dim", s.feature_dim},
          {"hidden", s.hidden},
          {"vocab", {{"objects", s.vocab.objects},
                     {"predicates", s.vocab.predicates},
                     {"global", s.vocab.global}}}};
}

}  // namespace

std::string canonical_shape(const ModelShape& s) {
  return "d=" + std::to_string(s.feature_dim) + ";h=" + std::to_string(s.hidden) +
         ";vo=" + std::to_string(s.vocab.objects) +
         ";vp=" + std::to_string(s.vocab.predicates) +
         ";vg=" + std::to_string(s.vocab.global) + ";act=relu;maps=7";
}

std::uint64_t shape_hash(const ModelShape& shape) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_shape(shape)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_checkpoint(const PotentialModel& model) {
  nlohmann::json header;
  header["format"] = 1;
  header["shape"] = shape_json(model.shape());
  header["param_count"] = model.num_parameters();
  header["config_hash"] = hex(shape_hash(model.shape()));
  nlohmann::json maps = nlohmann::json::array();
  for (MapKind kind : kAllMaps) {
    const MlpLayout& l = model.layout(kind);
    maps.push_back({{"name", std::string(map_name(kind))},
                    {"input", l.input},
                    {"hidden", l.hidden},
                    {"output", l.output},
                    {"offset", l.offset}});
  }
  header["maps"] = std::move(maps);
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u64(out, text.size());
  out += text;
  for (double p : model.parameters()) put_u64(out, std::bit_cast<std::uint64_t>(p));
  return out;
}

PotentialModel deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw Error("checkpoint: bad magic");
  }
  const std::uint64_t hlen = get_u64(bytes, 8);
  if (hlen > bytes.size() - 16) throw Error("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint: unreadable header: ") + e.what());
  }
  ModelShape shape;
  try {
    const auto& s = header.at("shape");
    shape.feature_dim = s.at("feature_dim").get<std::size_t>();
    shape.hidden = s.at("hidden").get<std::size_t>();
    shape.vocab.objects = s.at("vocab").at("objects").get<std::size_t>();
    shape.vocab.predicates = s.at("vocab").at("predicates").get<std::size_t>();
    shape.vocab.global = s.at("vocab").at("global").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint: bad shape: ") + e.what());
  }
  const std::string stored = header.value("config_hash", std::string{});
  if (stored != hex(shape_hash(shape))) {
    throw Error("checkpoint: config hash mismatch (stored " + stored +
                ", computed " + hex(shape_hash(shape)) + ")");
  }
  PotentialModel model(shape);
  const std::size_t n = header.value("param_count", std::size_t{0});
  if (n != model.num_parameters()) {
    throw Error("checkpoint: parameter count " + std::to_string(n) +
                " does not match the shape (" +
                std::to_string(model.num_parameters()) + ")");
  }
  const std::size_t blob = 16 + hlen;
  if (bytes.size() != blob + 8 * n) throw Error("checkpoint: parameter blob has the wrong size");
  auto params = model.mutable_parameters();
  for (std::size_t i = 0; i < n; ++i) {
    params[i] = std::bit_cast<double>(get_u64(bytes, blob + 8 * i));
  }
  return model;
}

void save_checkpoint(const PotentialModel& model, const std::string& path) {
  write_file(path, serialize_checkpoint(model));
}

PotentialModel load_checkpoint(const std::string& path, const ModelShape* expected) {
  PotentialModel model = deserialize_checkpoint(read_file(path));
  if (expected && !(model.shape() == *expected)) {
    throw Error("checkpoint '" + path + "': shape " + canonical_shape(model.shape()) +
                " does not match the configured " + canonical_shape(*expected));
  }
  return model;
}

}  // namespace sgvi
