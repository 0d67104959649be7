#include "deepsched/harness/agent_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace deepsched {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

void put_blob(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& b) {
  put_u32(out, static_cast<std::uint32_t>(b.size()));
  out.insert(out.end(), b.begin(), b.end());
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size()) throw std::runtime_error("agent checkpoint: truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
    pos += n;
    return s;
  }
  std::vector<std::uint8_t> blob() {
    const std::uint32_t n = u32();
    need(n);
    std::vector<std::uint8_t> b(bytes.begin() + pos, bytes.begin() + pos + n);
    pos += n;
    return b;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, bytes.data() + pos, 8);
    pos += 8;
    return v;
  }
  template <class T>
  void raw_into(T* dst, size_t count) {
    need(count * sizeof(T));
    std::memcpy(dst, bytes.data() + pos, count * sizeof(T));
    pos += count * sizeof(T);
  }
};

void append_floats(std::vector<std::uint8_t>& out, const float* data, size_t n) {
  const size_t at = out.size();
  out.resize(at + n * sizeof(float));
  std::memcpy(out.data() + at, data, n * sizeof(float));
}

}  // namespace

std::vector<std::uint8_t> serialize_adam(const AdamState<float>& opt) {
  std::vector<std::uint8_t> out;
  put_u64(out, static_cast<std::uint64_t>(opt.step));
  put_u32(out, static_cast<std::uint32_t>(opt.mw.size()));
  for (size_t i = 0; i < opt.mw.size(); ++i) {
    append_floats(out, opt.mw[i].data(), opt.mw[i].size());
    append_floats(out, opt.vw[i].data(), opt.vw[i].size());
    append_floats(out, opt.mb[i].data(), opt.mb[i].size());
    append_floats(out, opt.vb[i].data(), opt.vb[i].size());
  }
  return out;
}

AdamState<float> deserialize_adam(const std::vector<std::uint8_t>& bytes,
                                  const DenseNet<float>& shape_ref, float lr) {
  AdamState<float> opt(shape_ref, lr);
  Reader r{bytes};
  opt.step = static_cast<long long>(r.u64());
  const std::uint32_t layers = r.u32();
  if (layers != opt.mw.size()) throw std::runtime_error("agent checkpoint: optimizer shape");
  for (std::uint32_t i = 0; i < layers; ++i) {
    r.raw_into(opt.mw[i].data(), opt.mw[i].size());
    r.raw_into(opt.vw[i].data(), opt.vw[i].size());
    r.raw_into(opt.mb[i].data(), opt.mb[i].size());
    r.raw_into(opt.vb[i].data(), opt.vb[i].size());
  }
  return opt;
}

void save_agent_checkpoint(const AgentCheckpoint& ckpt, const std::string& path) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_str(out, ckpt.algo);
  put_str(out, ckpt.arch);
  put_u32(out, static_cast<std::uint32_t>(ckpt.max_candidates));
  put_u32(out, static_cast<std::uint32_t>(ckpt.n_rbg));
  put_u32(out, static_cast<std::uint32_t>(ckpt.max_layers));
  put_u32(out, static_cast<std::uint32_t>(ckpt.nets.size()));
  for (const auto& [name, blob] : ckpt.nets) {
    put_str(out, name);
    put_blob(out, blob);
  }
  put_u32(out, static_cast<std::uint32_t>(ckpt.scalars.size()));
  for (const auto& [name, v] : ckpt.scalars) {
    put_str(out, name);
    const size_t at = out.size();
    out.resize(at + 8);
    std::memcpy(out.data() + at, &v, 8);
  }
  put_u32(out, static_cast<std::uint32_t>(ckpt.optimizers.size()));
  for (const auto& [name, blob] : ckpt.optimizers) {
    put_str(out, name);
    put_blob(out, blob);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("agent checkpoint: cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("agent checkpoint: write failed for " + path);
}

AgentCheckpoint load_agent_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("agent checkpoint: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  Reader r{bytes};
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error("agent checkpoint: bad magic");
  r.pos = 4;
  if (r.u32() != kVersion) throw std::runtime_error("agent checkpoint: unsupported version");

  AgentCheckpoint ckpt;
  ckpt.algo = r.str();
  ckpt.arch = r.str();
  ckpt.max_candidates = static_cast<int>(r.u32());
  ckpt.n_rbg = static_cast<int>(r.u32());
  ckpt.max_layers = static_cast<int>(r.u32());
  const std::uint32_t n_nets = r.u32();
  for (std::uint32_t i = 0; i < n_nets; ++i) {
    const std::string name = r.str();
    ckpt.nets[name] = r.blob();
  }
  const std::uint32_t n_scalars = r.u32();
  for (std::uint32_t i = 0; i < n_scalars; ++i) {
    const std::string name = r.str();
    ckpt.scalars[name] = r.f64();
  }
  const std::uint32_t n_opts = r.u32();
  for (std::uint32_t i = 0; i < n_opts; ++i) {
    const std::string name = r.str();
    ckpt.optimizers[name] = r.blob();
  }
  return ckpt;
}

}  // namespace deepsched
