#include "tengen/policy_net.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace tengen {

Arch arch_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Arch::A;
  if (s == "B" || s == "b") return Arch::B;
  if (s == "C" || s == "c") return Arch::C;
  if (s == "R2" || s == "r2" || s == "R-2" || s == "r-2") return Arch::R2;
  if (s == "R3" || s == "r3" || s == "R-3" || s == "r-3") return Arch::R3;
  throw std::invalid_argument("unknown architecture id: " + s);
}

std::string arch_to_string(Arch a) {
  switch (a) {
    case Arch::A: return "A";
    case Arch::B: return "B";
    case Arch::C: return "C";
    case Arch::R2: return "R-2";
    case Arch::R3: return "R-3";
  }
  return "?";
}

size_t PolicyNet::parameter_count() const {
  size_t n = 0;
  for (size_t i = 0; i < layers.size(); ++i)
    n += layers[i].weight_count() + layers[i].out_ch;
  return n;
}

PolicyNet build_architecture(Arch id, int board_size) {
  if (board_size < kMinBoardSize || board_size > kMaxBoardSize)
    throw std::invalid_argument("board size out of range");
  PolicyNet net;
  auto add = [&net](int in, int out, int k, bool relu) {
    net.layers.push_back(LayerSpec{in, out, k, k, relu});
  };
  switch (id) {
    case Arch::A:
      add(16, 128, 9, true);
      add(128, 128, 3, true);
      add(128, 1, 3, false);
      break;
    case Arch::B:
      add(16, 128, 9, true);
      for (int i = 0; i < 4; ++i) add(128, 128, 3, true);
      add(128, 1, 3, false);
      break;
    case Arch::C:
      add(16, 128, 5, true);
      for (int i = 0; i < 10; ++i) add(128, 128, 3, true);
      add(128, 1, 3, false);
      break;
    case Arch::R2:
      add(16, 16, 9, true);
      add(16, 1, 3, false);
      break;
    case Arch::R3:
      add(16, 16, 9, true);
      add(16, 16, 3, true);
      add(16, 1, 3, false);
      break;
  }
  for (const auto& l : net.layers) {
    net.weights.emplace_back(l.weight_count(), 0.0f);
    net.biases.emplace_back(l.out_ch, 0.0f);
  }
  return net;
}

void glorot_init(PolicyNet& net, uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    double fan_in = static_cast<double>(l.in_ch) * l.kh * l.kw;
    double fan_out = static_cast<double>(l.out_ch) * l.kh * l.kw;
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<float> dist(-limit, limit);
    for (auto& w : net.weights[i]) w = dist(gen);
    for (auto& b : net.biases[i]) b = 0.0f;
  }
}

void conv2d(const LayerSpec& spec, const float* w, const float* b,
            const float* x, float* y, int size) {
  const int n = size * size;
  const int ph = spec.kh / 2, pw = spec.kw / 2;
  for (int oc = 0; oc < spec.out_ch; ++oc) {
    float* yp = y + static_cast<size_t>(oc) * n;
    std::fill(yp, yp + n, b[oc]);
    const float* woc = w + static_cast<size_t>(oc) * spec.in_ch * spec.kh * spec.kw;
    for (int ic = 0; ic < spec.in_ch; ++ic) {
      const float* xp = x + static_cast<size_t>(ic) * n;
      const float* wic = woc + static_cast<size_t>(ic) * spec.kh * spec.kw;
      for (int ky = 0; ky < spec.kh; ++ky) {
        const int dr = ky - ph;
        const int r0 = std::max(0, -dr), r1 = std::min(size, size - dr);
        for (int kx = 0; kx < spec.kw; ++kx) {
          const float wv = wic[ky * spec.kw + kx];
          const int dc = kx - pw;
          const int c0 = std::max(0, -dc), c1 = std::min(size, size - dc);
          for (int r = r0; r < r1; ++r) {
            const float* xrow = xp + (r + dr) * size + dc;
            float* yrow = yp + r * size;
            for (int c = c0; c < c1; ++c) yrow[c] += wv * xrow[c];
          }
        }
      }
    }
  }
}

void conv2d_backward_input(const LayerSpec& spec, const float* w,
                           const float* dy, float* dx, int size) {
  const int n = size * size;
  const int ph = spec.kh / 2, pw = spec.kw / 2;
  std::fill(dx, dx + static_cast<size_t>(spec.in_ch) * n, 0.0f);
  for (int oc = 0; oc < spec.out_ch; ++oc) {
    const float* dyp = dy + static_cast<size_t>(oc) * n;
    const float* woc = w + static_cast<size_t>(oc) * spec.in_ch * spec.kh * spec.kw;
    for (int ic = 0; ic < spec.in_ch; ++ic) {
      float* dxp = dx + static_cast<size_t>(ic) * n;
      const float* wic = woc + static_cast<size_t>(ic) * spec.kh * spec.kw;
      for (int ky = 0; ky < spec.kh; ++ky) {
        const int dr = ky - ph;
        const int r0 = std::max(0, -dr), r1 = std::min(size, size - dr);
        for (int kx = 0; kx < spec.kw; ++kx) {
          const float wv = wic[ky * spec.kw + kx];
          const int dc = kx - pw;
          const int c0 = std::max(0, -dc), c1 = std::min(size, size - dc);
          for (int r = r0; r < r1; ++r) {
            float* dxrow = dxp + (r + dr) * size + dc;
            const float* dyrow = dyp + r * size;
            for (int c = c0; c < c1; ++c) dxrow[c] += wv * dyrow[c];
          }
        }
      }
    }
  }
}

void conv2d_backward_params(const LayerSpec& spec, const float* x,
                            const float* dy, float* dw, float* db, int size) {
  const int n = size * size;
  const int ph = spec.kh / 2, pw = spec.kw / 2;
  for (int oc = 0; oc < spec.out_ch; ++oc) {
    const float* dyp = dy + static_cast<size_t>(oc) * n;
    double bsum = 0.0;
    for (int i = 0; i < n; ++i) bsum += dyp[i];
    db[oc] += static_cast<float>(bsum);
    float* woc = dw + static_cast<size_t>(oc) * spec.in_ch * spec.kh * spec.kw;
    for (int ic = 0; ic < spec.in_ch; ++ic) {
      const float* xp = x + static_cast<size_t>(ic) * n;
      float* wic = woc + static_cast<size_t>(ic) * spec.kh * spec.kw;
      for (int ky = 0; ky < spec.kh; ++ky) {
        const int dr = ky - ph;
        const int r0 = std::max(0, -dr), r1 = std::min(size, size - dr);
        for (int kx = 0; kx < spec.kw; ++kx) {
          const int dc = kx - pw;
          const int c0 = std::max(0, -dc), c1 = std::min(size, size - dc);
          double acc = 0.0;
          for (int r = r0; r < r1; ++r) {
            const float* xrow = xp + (r + dr) * size + dc;
            const float* dyrow = dyp + r * size;
            for (int c = c0; c < c1; ++c) acc += xrow[c] * dyrow[c];
          }
          wic[ky * spec.kw + kx] += static_cast<float>(acc);
        }
      }
    }
  }
}

bool masked_softmax(const float* logits, const uint8_t* mask, int n,
                    float* out) {
  float max_logit = -std::numeric_limits<float>::infinity();
  bool any = false;
  for (int i = 0; i < n; ++i) {
    if (mask[i]) {
      any = true;
      max_logit = std::max(max_logit, logits[i]);
    }
  }
  if (!any) {
    std::fill(out, out + n, 0.0f);
    return false;
  }
  float sum = 0.0f;
  for (int i = 0; i < n; ++i) {
    if (mask[i]) {
      out[i] = std::exp(logits[i] - max_logit);
      sum += out[i];
    } else {
      out[i] = 0.0f;
    }
  }
  const float inv = 1.0f / sum;
  for (int i = 0; i < n; ++i)
    if (mask[i]) out[i] *= inv;
  return true;
}

namespace {

void validate_batch(const PolicyNet& net,
                    const std::vector<FeatureTensor>& inputs,
                    const std::vector<std::vector<uint8_t>>& masks) {
  if (inputs.size() != masks.size())
    throw std::invalid_argument("forward_batch: inputs/masks size mismatch");
  if (net.layers.empty()) throw std::invalid_argument("empty network");
  for (size_t i = 0; i < inputs.size(); ++i) {
    const int n = inputs[i].size * inputs[i].size;
    if (inputs[i].planes.size() !=
        static_cast<size_t>(net.layers.front().in_ch) * n)
      throw std::invalid_argument("forward_batch: channel mismatch");
    if (masks[i].size() != static_cast<size_t>(n))
      throw std::invalid_argument("forward_batch: mask size mismatch");
    if (inputs[i].size != inputs[0].size)
      throw std::invalid_argument("forward_batch: mixed board sizes");
  }
}

// Conv stack for one lane using preallocated ping-pong buffers.
void forward_lane(const PolicyNet& net, const float* input, int size,
                  float* buf_a, float* buf_b, float* logits) {
  const int n = size * size;
  const float* cur = input;
  float* bufs[2] = {buf_a, buf_b};
  int which = 0;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const auto& spec = net.layers[li];
    float* out = (li + 1 == net.layers.size()) ? logits : bufs[which];
    conv2d(spec, net.weights[li].data(), net.biases[li].data(), cur, out,
           size);
    if (spec.has_relu) {
      const size_t cnt = static_cast<size_t>(spec.out_ch) * n;
      for (size_t i = 0; i < cnt; ++i) out[i] = std::max(0.0f, out[i]);
    }
    cur = out;
    which ^= 1;
  }
}

// Straight per-pixel convolution, the slow reference path.
void conv2d_naive(const LayerSpec& spec, const float* w, const float* b,
                  const float* x, float* y, int size) {
  const int n = size * size;
  const int ph = spec.kh / 2, pw = spec.kw / 2;
  for (int oc = 0; oc < spec.out_ch; ++oc) {
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        float acc = b[oc];
        for (int ic = 0; ic < spec.in_ch; ++ic) {
          for (int ky = 0; ky < spec.kh; ++ky) {
            int rr = r + ky - ph;
            if (rr < 0 || rr >= size) continue;
            for (int kx = 0; kx < spec.kw; ++kx) {
              int cc = c + kx - pw;
              if (cc < 0 || cc >= size) continue;
              acc += w[((static_cast<size_t>(oc) * spec.in_ch + ic) * spec.kh +
                        ky) * spec.kw + kx] *
                     x[static_cast<size_t>(ic) * n + rr * size + cc];
            }
          }
        }
        y[static_cast<size_t>(oc) * n + r * size + c] = acc;
      }
    }
  }
}

}  // namespace

std::vector<MoveDistribution> forward_batch(
    const PolicyNet& net, const std::vector<FeatureTensor>& inputs,
    const std::vector<std::vector<uint8_t>>& legal_masks) {
  validate_batch(net, inputs, legal_masks);
  std::vector<MoveDistribution> out(inputs.size());
  if (inputs.empty()) return out;
  const int size = inputs[0].size;
  const int n = size * size;
  int max_ch = 1;
  for (const auto& l : net.layers) max_ch = std::max(max_ch, l.out_ch);

#pragma omp parallel
  {
    std::vector<float> buf_a(static_cast<size_t>(max_ch) * n);
    std::vector<float> buf_b(static_cast<size_t>(max_ch) * n);
    std::vector<float> logits(n);
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(inputs.size()); ++i) {
      forward_lane(net, inputs[i].planes.data(), size, buf_a.data(),
                   buf_b.data(), logits.data());
      out[i].probs.resize(n);
      out[i].all_pass = !masked_softmax(logits.data(), legal_masks[i].data(),
                                        n, out[i].probs.data());
    }
  }
  return out;
}

std::vector<MoveDistribution> forward_batch_serial(
    const PolicyNet& net, const std::vector<FeatureTensor>& inputs,
    const std::vector<std::vector<uint8_t>>& legal_masks) {
  validate_batch(net, inputs, legal_masks);
  std::vector<MoveDistribution> out(inputs.size());
  if (inputs.empty()) return out;
  const int size = inputs[0].size;
  const int n = size * size;
  int max_ch = 1;
  for (const auto& l : net.layers) max_ch = std::max(max_ch, l.out_ch);
  std::vector<float> buf_a(static_cast<size_t>(max_ch) * n);
  std::vector<float> buf_b(static_cast<size_t>(max_ch) * n);
  std::vector<float> logits(n);
  for (size_t i = 0; i < inputs.size(); ++i) {
    const float* cur = inputs[i].planes.data();
    float* bufs[2] = {buf_a.data(), buf_b.data()};
    int which = 0;
    for (size_t li = 0; li < net.layers.size(); ++li) {
      const auto& spec = net.layers[li];
      float* dst = (li + 1 == net.layers.size()) ? logits.data() : bufs[which];
      conv2d_naive(spec, net.weights[li].data(), net.biases[li].data(), cur,
                   dst, size);
      if (spec.has_relu)
        for (size_t k = 0; k < static_cast<size_t>(spec.out_ch) * n; ++k)
          dst[k] = std::max(0.0f, dst[k]);
      cur = dst;
      which ^= 1;
    }
    out[i].probs.resize(n);
    out[i].all_pass = !masked_softmax(logits.data(), legal_masks[i].data(), n,
                                      out[i].probs.data());
  }
  return out;
}

namespace {

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(x & 0xff);
  v.push_back((x >> 8) & 0xff);
  v.push_back((x >> 16) & 0xff);
  v.push_back((x >> 24) & 0xff);
}

void put_f32(std::vector<uint8_t>& v, float f) {
  uint32_t x;
  std::memcpy(&x, &f, 4);
  put_u32(v, x);
}

uint32_t get_u32(const std::vector<uint8_t>& v, size_t& off) {
  if (off + 4 > v.size()) throw std::runtime_error("weight file truncated");
  uint32_t x = v[off] | (v[off + 1] << 8) | (v[off + 2] << 16) |
               (static_cast<uint32_t>(v[off + 3]) << 24);
  off += 4;
  return x;
}

float get_f32(const std::vector<uint8_t>& v, size_t& off) {
  uint32_t x = get_u32(v, off);
  float f;
  std::memcpy(&f, &x, 4);
  return f;
}

}  // namespace

std::vector<uint8_t> serialize_weights(const PolicyNet& net) {
  std::vector<uint8_t> v;
  v.push_back('C');
  v.push_back('P');
  v.push_back('N');
  v.push_back('W');
  put_u32(v, 1);
  put_u32(v, static_cast<uint32_t>(net.layers.size()));
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    put_u32(v, l.in_ch);
    put_u32(v, l.out_ch);
    put_u32(v, l.kh);
    put_u32(v, l.kw);
    v.push_back(l.has_relu ? 1 : 0);
    for (float w : net.weights[i]) put_f32(v, w);
    for (float b : net.biases[i]) put_f32(v, b);
  }
  uint32_t crc = crc32(0L, v.data(), static_cast<uInt>(v.size()));
  put_u32(v, crc);
  return v;
}

PolicyNet deserialize_weights(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 16) throw std::runtime_error("weight file truncated");
  if (std::memcmp(bytes.data(), "CPNW", 4) != 0)
    throw std::runtime_error("bad weight file magic");
  uint32_t stored_crc = 0;
  {
    size_t off = bytes.size() - 4;
    stored_crc = get_u32(bytes, off);
  }
  uint32_t crc = crc32(0L, bytes.data(), static_cast<uInt>(bytes.size() - 4));
  if (crc != stored_crc) throw std::runtime_error("weight file CRC mismatch");

  size_t off = 4;
  uint32_t version = get_u32(bytes, off);
  if (version != 1) throw std::runtime_error("unsupported weight version");
  uint32_t layer_count = get_u32(bytes, off);
  PolicyNet net;
  for (uint32_t i = 0; i < layer_count; ++i) {
    LayerSpec l;
    l.in_ch = static_cast<int>(get_u32(bytes, off));
    l.out_ch = static_cast<int>(get_u32(bytes, off));
    l.kh = static_cast<int>(get_u32(bytes, off));
    l.kw = static_cast<int>(get_u32(bytes, off));
    if (off >= bytes.size()) throw std::runtime_error("weight file truncated");
    l.has_relu = bytes[off++] != 0;
    if (l.in_ch <= 0 || l.out_ch <= 0 || l.kh <= 0 || l.kw <= 0 ||
        l.kh % 2 == 0 || l.kw % 2 == 0)
      throw std::runtime_error("invalid layer spec in weight file");
    net.layers.push_back(l);
    std::vector<float> w(l.weight_count());
    for (auto& x : w) x = get_f32(bytes, off);
    std::vector<float> b(l.out_ch);
    for (auto& x : b) x = get_f32(bytes, off);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  net.input_planes = net.layers.empty() ? 0 : net.layers.front().in_ch;
  return net;
}

void save_weights(const PolicyNet& net, const std::string& path) {
  auto bytes = serialize_weights(net);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

PolicyNet load_weights(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return deserialize_weights(bytes);
}

}  // namespace tengen
