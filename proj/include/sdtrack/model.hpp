/* Copyright 2026 The sdtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdtrack/backbone.hpp"
#include "sdtrack/combine.hpp"
#include "sdtrack/tape.hpp"

namespace sdtrack {

/// Shared backbone, a fixed-gain learned-bias adjustment of the correlation
/// ("response = gain * xcorr + bias"), and an optional encoder head.
template <class Real>
class SiameseModel {
 public:
  explicit SiameseModel(const BackboneConfig& config = {}, Real response_gain = Real(1e-3));

  /// Adjusted response of an exemplar code over a search code.
  Tensor3<Real> response(const Tensor3<Real>& target_code, const Tensor3<Real>& search_code) const;
  Real adjust(Real raw) const { return gain.value[0] * raw + bias.value[0]; }

  /// Batch graph used for training: embeds both patch batches, correlates the
  /// masked exemplar codes with the search codes and adjusts them. With a head
  /// the n maps per sample are aggregated to one; without one, keeps must hold
  /// at most one map.
  typename Tape<Real>::Var forward(Tape<Real>& tape, typename Tape<Real>::Var exemplars,
                                   typename Tape<Real>::Var searches,
                                   std::span<const Tensor3<Real>> keeps, BnMode backbone_mode,
                                   BnMode head_mode, bool use_head);

  std::vector<Param<Real>*> params();

  Backbone<Real> backbone;
  Param<Real> gain;  // fixed
  Param<Real> bias;
  std::optional<EncoderHead<Real>> head;
};

using Model = SiameseModel<float>;

/// Named array for persistence.
struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;
};

/// Every persistent array of a model: parameters, batchnorm running
/// statistics, and head parameters when present.
std::vector<NamedTensor> state_dict(const Model& model);
/// Inverse of state_dict. The backbone layout must match; a head is created
/// when head tensors are present.
void load_state_dict(Model& model, const std::vector<NamedTensor>& tensors);

/// Raw correlation of an exemplar code with the embedding of a search patch.
template <class Real>
Tensor3<Real> response(const Backbone<Real>& backbone, const Tensor3<Real>& exemplar_code,
                       const Tensor3<Real>& search_patch);

}  // namespace sdtrack
