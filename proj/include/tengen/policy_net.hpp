#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tengen/features.hpp"

namespace tengen {

enum class Arch { A, B, C, R2, R3 };

Arch arch_from_string(const std::string& s);
std::string arch_to_string(Arch a);

// One zero-padded, unit-stride convolution layer. Odd kernel extents keep
// the spatial size; the final layer is 1-channel with no ReLU.
struct LayerSpec {
  int in_ch = 0;
  int out_ch = 0;
  int kh = 0;
  int kw = 0;
  bool has_relu = true;

  size_t weight_count() const {
    return static_cast<size_t>(out_ch) * in_ch * kh * kw;
  }
};

struct MoveDistribution {
  std::vector<float> probs;  // size*size, zero at masked points
  bool all_pass = false;     // empty legal mask
};

struct PolicyNet {
  std::vector<LayerSpec> layers;
  // Per layer, [out][in][kh][kw] order.
  std::vector<std::vector<float>> weights;
  std::vector<std::vector<float>> biases;
  int input_planes = kFeaturePlanes;

  size_t parameter_count() const;
};

// Layer stacks per architecture id:
//   A   = 9x9x128 / 3x3x128x1  / 3x3x1   (3 layers)
//   B   = 9x9x128 / 3x3x128x4  / 3x3x1   (6 layers)
//   C   = 5x5x128 / 3x3x128x10 / 3x3x1   (12 layers)
//   R-2 = 9x9x16  /            / 3x3x1   (2 layers)
//   R-3 = 9x9x16  / 3x3x16x1   / 3x3x1   (3 layers)
// Weights are zero-initialized; call glorot_init for random weights.
PolicyNet build_architecture(Arch id, int board_size = 19);

// Uniform in +-sqrt(6/(fan_in+fan_out)), seeded.
void glorot_init(PolicyNet& net, uint64_t seed);

// Batched masked inference: conv stack -> single-channel logits -> mask ->
// softmax. Lanes run under OpenMP; results are batch-order independent.
std::vector<MoveDistribution> forward_batch(
    const PolicyNet& net, const std::vector<FeatureTensor>& inputs,
    const std::vector<std::vector<uint8_t>>& legal_masks);

// Serial reference path (no OpenMP, straightforward loops); kept for
// testing and for the benchmark comparison.
std::vector<MoveDistribution> forward_batch_serial(
    const PolicyNet& net, const std::vector<FeatureTensor>& inputs,
    const std::vector<std::vector<uint8_t>>& legal_masks);

// Raw conv primitives, shared with the trainer.
void conv2d(const LayerSpec& spec, const float* w, const float* b,
            const float* x, float* y, int size);
void conv2d_backward_input(const LayerSpec& spec, const float* w,
                           const float* dy, float* dx, int size);
void conv2d_backward_params(const LayerSpec& spec, const float* x,
                            const float* dy, float* dw, float* db, int size);

// Masked softmax over points with mask != 0; writes exact zeros elsewhere.
// Returns false (all_pass) when the mask is empty.
bool masked_softmax(const float* logits, const uint8_t* mask, int n,
                    float* out);

// Weight file, bit-exact little-endian: "CPNW", u32 version=1,
// u32 layer_count, per layer {u32 in, u32 out, u32 kh, u32 kw, u8 relu,
// f32 weights [out][in][kh][kw], f32 biases [out]}, then u32 CRC32 of all
// preceding bytes.
void save_weights(const PolicyNet& net, const std::string& path);
PolicyNet load_weights(const std::string& path);

std::vector<uint8_t> serialize_weights(const PolicyNet& net);
PolicyNet deserialize_weights(const std::vector<uint8_t>& bytes);

}  // namespace tengen
