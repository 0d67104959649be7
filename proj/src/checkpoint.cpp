#include "deepsched/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace deepsched {

namespace {

constexpr char kMagic[4] = {'D', 'S', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size()) throw std::runtime_error("checkpoint: truncated payload");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return bytes[pos++];
  }
  void raw(void* dst, size_t n) {
    need(n);
    std::memcpy(dst, bytes.data() + pos, n);
    pos += n;
  }
};

}  // namespace

std::vector<std::uint8_t> serialize(const DenseNet<float>& net) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(net.n_layers()));
  for (const auto& l : net.layers()) {
    put_u32(out, static_cast<std::uint32_t>(l.w.cols()));
    put_u32(out, static_cast<std::uint32_t>(l.w.rows()));
    out.push_back(static_cast<std::uint8_t>(l.act));
  }
  put_u32(out, static_cast<std::uint32_t>(net.branch_sizes().size()));
  for (int b : net.branch_sizes()) put_u32(out, static_cast<std::uint32_t>(b));

  for (const auto& l : net.layers()) {
    const size_t wb = static_cast<size_t>(l.w.size()) * sizeof(float);
    const size_t bb = static_cast<size_t>(l.b.size()) * sizeof(float);
    const size_t at = out.size();
    out.resize(at + wb + bb);
    std::memcpy(out.data() + at, l.w.data(), wb);
    std::memcpy(out.data() + at + wb, l.b.data(), bb);
  }
  return out;
}

DenseNet<float> deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported format version");

  const std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 64) throw std::runtime_error("checkpoint: corrupted header");
  std::vector<int> sizes;
  std::vector<Activation> acts;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::uint32_t in = r.u32();
    const std::uint32_t out = r.u32();
    const std::uint8_t act = r.u8();
    if (in == 0 || out == 0 || act > 1) throw std::runtime_error("checkpoint: corrupted header");
    if (i == 0) sizes.push_back(static_cast<int>(in));
    else if (sizes.back() != static_cast<int>(in))
      throw std::runtime_error("checkpoint: layer dimensions do not chain");
    sizes.push_back(static_cast<int>(out));
    acts.push_back(static_cast<Activation>(act));
  }
  const std::uint32_t n_branches = r.u32();
  if (n_branches == 0 || n_branches > 4096) throw std::runtime_error("checkpoint: corrupted header");
  std::vector<int> branches;
  int branch_total = 0;
  for (std::uint32_t i = 0; i < n_branches; ++i) {
    branches.push_back(static_cast<int>(r.u32()));
    branch_total += branches.back();
  }
  if (branch_total != sizes.back())
    throw std::runtime_error("checkpoint: branch layout does not match output size");

  Rng rng(0);
  DenseNet<float> net(sizes, branches, rng);
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    auto& l = net.layers()[i];
    l.act = acts[i];
    r.raw(l.w.data(), static_cast<size_t>(l.w.size()) * sizeof(float));
    r.raw(l.b.data(), static_cast<size_t>(l.b.size()) * sizeof(float));
  }
  if (r.pos != bytes.size()) throw std::runtime_error("checkpoint: trailing bytes");
  return net;
}

void save_net(const DenseNet<float>& net, const std::string& path) {
  const auto bytes = serialize(net);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

DenseNet<float> load_net(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace deepsched
