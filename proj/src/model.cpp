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
#include "sdtrack/model.hpp"

#include <map>
#include <stdexcept>

#include "sdtrack/ops.hpp"

namespace sdtrack {

template <class Real>
SiameseModel<Real>::SiameseModel(const BackboneConfig& config, Real response_gain)
    : backbone(config), gain("response.gain", {1}, response_gain), bias("response.bias", {1}) {
  gain.trainable = false;
}

template <class Real>
Tensor3<Real> SiameseModel<Real>::response(const Tensor3<Real>& target_code,
                                           const Tensor3<Real>& search_code) const {
  Tensor3<Real> out = xcorr(target_code, search_code);
  for (auto& v : out.data()) v = adjust(v);
  return out;
}

template <class Real>
typename Tape<Real>::Var SiameseModel<Real>::forward(Tape<Real>& tape,
                                                     typename Tape<Real>::Var exemplars,
                                                     typename Tape<Real>::Var searches,
                                                     std::span<const Tensor3<Real>> keeps,
                                                     BnMode backbone_mode, BnMode head_mode,
                                                     bool use_head) {
  auto z = backbone.embed(tape, exemplars, backbone_mode);
  auto x = backbone.embed(tape, searches, backbone_mode);
  auto r = tape.scale_shift(tape.masked_xcorr(z, x, keeps), gain, bias);
  if (!use_head) {
    if (keeps.size() > 1) throw std::invalid_argument("several dropout passes need a head");
    return r;
  }
  if (!head) throw std::logic_error("model has no encoder head");
  return head->aggregate(tape, r, head_mode);
}

template <class Real>
std::vector<Param<Real>*> SiameseModel<Real>::params() {
  auto out = backbone.params();
  out.push_back(&gain);
  out.push_back(&bias);
  if (head) {
    for (auto* p : head->params()) out.push_back(p);
  }
  return out;
}

template class SiameseModel<float>;
template class SiameseModel<double>;

template <class Real>
Tensor3<Real> response(const Backbone<Real>& backbone, const Tensor3<Real>& exemplar_code,
                       const Tensor3<Real>& search_patch) {
  return xcorr(exemplar_code, backbone.embed(search_patch));
}

template Tensor3<float> response(const Backbone<float>&, const Tensor3<float>&,
                                 const Tensor3<float>&);
template Tensor3<double> response(const Backbone<double>&, const Tensor3<double>&,
                                  const Tensor3<double>&);

namespace {

void put(std::vector<NamedTensor>& out, const Param<float>& p) {
  out.push_back({p.name, p.shape, p.value});
}

void put_stats(std::vector<NamedTensor>& out, const BatchNorm<float>& bn, const std::string& base) {
  out.push_back({base + ".running_mean", {bn.channels}, bn.running_mean});
  out.push_back({base + ".running_var", {bn.channels}, bn.running_var});
  out.push_back({base + ".eps", {1}, {bn.eps}});
}

std::string prefix_of(const Param<float>& p) {
  return p.name.substr(0, p.name.rfind('.'));
}

}  // namespace

std::vector<NamedTensor> state_dict(const Model& model) {
  std::vector<NamedTensor> out;
  for (const auto& b : model.backbone.blocks()) {
    put(out, b.conv.weight);
    put(out, b.conv.bias);
    put(out, b.bn.scale);
    put(out, b.bn.shift);
    put_stats(out, b.bn, prefix_of(b.bn.scale));
  }
  put(out, model.gain);
  put(out, model.bias);
  if (model.head) {
    const auto& h = *model.head;
    for (const auto* p : {&h.project.weight, &h.project.bias, &h.project_bn.scale,
                          &h.project_bn.shift, &h.collapse.weight, &h.collapse.bias,
                          &h.collapse_bn.scale, &h.collapse_bn.shift}) {
      put(out, *p);
    }
    put_stats(out, h.project_bn, "head.project_bn");
    put_stats(out, h.collapse_bn, "head.collapse_bn");
  }
  return out;
}

void load_state_dict(Model& model, const std::vector<NamedTensor>& tensors) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;
  auto take = [&](const std::string& name, std::vector<float>& dst) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("weights: missing tensor " + name);
    if (it->second->values.size() != dst.size()) {
      throw std::runtime_error("weights: tensor " + name + " has " +
                               std::to_string(it->second->values.size()) + " values, expected " +
                               std::to_string(dst.size()));
    }
    dst = it->second->values;
  };
  auto take_param = [&](Param<float>& p) { take(p.name, p.value); };
  auto take_bn = [&](BatchNorm<float>& bn, const std::string& base) {
    take_param(bn.scale);
    take_param(bn.shift);
    take(base + ".running_mean", bn.running_mean);
    take(base + ".running_var", bn.running_var);
    std::vector<float> eps{bn.eps};
    take(base + ".eps", eps);
    bn.eps = eps[0];
  };
  for (auto& b : model.backbone.blocks()) {
    take_param(b.conv.weight);
    take_param(b.conv.bias);
    take_bn(b.bn, prefix_of(b.bn.scale));
  }
  take_param(model.gain);
  take_param(model.bias);
  auto head_weight = by_name.find("head.project.weight");
  if (head_weight == by_name.end()) {
    model.head.reset();
    return;
  }
  const auto& shape = head_weight->second->shape;
  if (shape.size() != 4 || shape[0] != EncoderHead<float>::kHidden) {
    throw std::runtime_error("weights: malformed head.project.weight");
  }
  EncoderHead<float> head(shape[1], 0);
  take_param(head.project.weight);
  take_param(head.project.bias);
  take_bn(head.project_bn, "head.project_bn");
  take_param(head.collapse.weight);
  take_param(head.collapse.bias);
  take_bn(head.collapse_bn, "head.collapse_bn");
  model.head = std::move(head);
}

}  // namespace sdtrack
