#include "raiju/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "raiju/errors.hpp"

namespace raiju {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

constexpr std::string_view kMagic = "RAIJUCKP";

class Writer {
 public:
  template <typename T>
  void pod(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(std::string_view s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T pod(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string str(const char* what) {
    const auto n = pod<std::uint32_t>(what);
    need(n, what);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw ParseError(std::string("checkpoint.") + what,
                       "truncated at byte " + std::to_string(pos_));
    }
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

struct NamedArray {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double>* data;
};

std::vector<NamedArray> layout(Checkpoint& c) {
  std::vector<NamedArray> out;
  auto add = [&out](const std::string& prefix, nn::ParamSet& p) {
    for (const auto& t : p.tensors()) {
      std::vector<std::uint64_t> dims{static_cast<std::uint64_t>(t.rows)};
      if (t.cols != 1) dims.push_back(static_cast<std::uint64_t>(t.cols));
      out.push_back({prefix + "." + std::string(t.name), dims, t.data});
    }
  };
  add("actor", c.actor);
  add("critic", c.critic);
  add("actor_opt.m", c.actor_opt.first_moment);
  add("actor_opt.v", c.actor_opt.second_moment);
  add("critic_opt.m", c.critic_opt.first_moment);
  add("critic_opt.v", c.critic_opt.second_moment);
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Checkpoint c = ckpt;
  if (!c.actor.same_shape(c.actor_opt.first_moment) || !c.actor.same_shape(c.actor_opt.second_moment) ||
      !c.critic.same_shape(c.critic_opt.first_moment) || !c.critic.same_shape(c.critic_opt.second_moment)) {
    throw ContractViolation("checkpoint optimizer state does not match parameter shapes");
  }
  Writer w;
  w.raw(kMagic);
  w.pod(kCheckpointVersion);
  w.pod(c.episodes_trained);
  w.pod(static_cast<std::uint32_t>(c.metadata.size()));
  for (const auto& [k, v] : c.metadata) {
    w.str(k);
    w.str(v);
  }
  w.str(c.rng_state);
  w.pod(c.actor_opt.step);
  w.pod(c.critic_opt.step);
  const auto arrays = layout(c);
  w.pod(static_cast<std::uint32_t>(arrays.size()));
  for (const NamedArray& a : arrays) {
    w.str(a.name);
    w.pod(static_cast<std::uint32_t>(a.dims.size()));
    for (auto d : a.dims) w.pod(d);
    for (double x : *a.data) w.pod(x);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.raw(kMagic.size(), "magic") != kMagic) throw ParseError("checkpoint.magic", "not a checkpoint file");
  const auto version = r.pod<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint.version", "unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  c.episodes_trained = r.pod<std::uint64_t>("episodes_trained");
  const auto n_meta = r.pod<std::uint32_t>("metadata");
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str("metadata");
    c.metadata[k] = r.str("metadata");
  }
  c.rng_state = r.str("rng_state");
  c.actor_opt.step = r.pod<std::int64_t>("actor_opt.step");
  c.critic_opt.step = r.pod<std::int64_t>("critic_opt.step");

  const auto n_arrays = r.pod<std::uint32_t>("arrays");
  // Shapes come from the file; rebuild each ParamSet from its w1/w2 dims.
  struct Raw {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;
  };
  std::map<std::string, Raw> raw;
  for (std::uint32_t i = 0; i < n_arrays; ++i) {
    Raw a;
    std::string name = r.str("array.name");
    const auto rank = r.pod<std::uint32_t>("array.rank");
    if (rank < 1 || rank > 2) throw ParseError("checkpoint." + name, "rank must be 1 or 2");
    std::uint64_t count = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      a.dims.push_back(r.pod<std::uint64_t>("array.dims"));
      count *= a.dims.back();
    }
    if (count > (1ULL << 28)) throw ParseError("checkpoint." + name, "array too large");
    a.data.resize(count);
    for (auto& x : a.data) x = r.pod<double>("array.data");
    raw[name] = std::move(a);
  }
  if (!r.at_end()) throw ParseError("checkpoint", "trailing bytes after last array");

  auto rebuild = [&raw](const std::string& prefix) {
    auto get = [&](const char* t) -> Raw& {
      auto it = raw.find(prefix + "." + t);
      if (it == raw.end()) throw ParseError("checkpoint." + prefix + "." + t, "missing array");
      return it->second;
    };
    Raw& w1 = get("w1");
    Raw& w2 = get("w2");
    if (w1.dims.size() != 2 || w2.dims.size() != 2 || w2.dims[1] != w1.dims[0]) {
      throw ParseError("checkpoint." + prefix, "inconsistent layer shapes");
    }
    kernels::DenseShape shape{static_cast<int>(w1.dims[1]), static_cast<int>(w1.dims[0]),
                              static_cast<int>(w2.dims[0])};
    nn::ParamSet p = nn::ParamSet::zeros(shape);
    p.w1 = std::move(w1.data);
    p.w2 = std::move(w2.data);
    p.b1 = std::move(get("b1").data);
    p.b2 = std::move(get("b2").data);
    if (p.b1.size() != static_cast<std::size_t>(shape.hidden) ||
        p.b2.size() != static_cast<std::size_t>(shape.out)) {
      throw ParseError("checkpoint." + prefix, "bias length does not match layer shape");
    }
    return p;
  };
  c.actor = rebuild("actor");
  c.critic = rebuild("critic");
  c.actor_opt.first_moment = rebuild("actor_opt.m");
  c.actor_opt.second_moment = rebuild("actor_opt.v");
  c.critic_opt.first_moment = rebuild("critic_opt.m");
  c.critic_opt.second_moment = rebuild("critic_opt.v");
  if (!c.actor.same_shape(c.actor_opt.first_moment) || !c.critic.same_shape(c.critic_opt.first_moment)) {
    throw ParseError("checkpoint", "optimizer state shape does not match parameters");
  }
  return c;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open checkpoint for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path, "write failed");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open checkpoint");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_checkpoint(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.where(), e.detail());
  }
}

}  // namespace raiju
