// Copyright 2026 The segrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "segrobust/analysis.hpp"
#include "segrobust/config.hpp"
#include "segrobust/corruptions.hpp"
#include "segrobust/dataset.hpp"
#include "segrobust/error.hpp"
#include "segrobust/evaluation.hpp"
#include "segrobust/heads.hpp"
#include "segrobust/model.hpp"
#include "segrobust/numerics.hpp"
#include "segrobust/report.hpp"
#include "segrobust/trainer.hpp"

namespace py = pybind11;
using namespace segrobust;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const Array& a) {
  std::vector<std::size_t> shape(a.shape(), a.shape() + a.ndim());
  return Tensor(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Tensor& t) {
  Array out(std::vector<py::ssize_t>(t.shape().begin(), t.shape().end()));
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::span<const double> as_span(const Array& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

LabelMap to_labels(const IntArray& a) {
  if (a.ndim() != 2) throw UsageError("label maps must be 2-D");
  return LabelMap(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                  std::vector<int>(a.data(), a.data() + a.size()));
}

IntArray to_array(const LabelMap& m) {
  IntArray out({static_cast<py::ssize_t>(m.height()), static_cast<py::ssize_t>(m.width())});
  std::copy(m.classes().begin(), m.classes().end(), out.mutable_data());
  return out;
}

ResponseMatrix to_responses(const Array& a) {
  if (a.ndim() != 2) throw UsageError("response matrices must be 2-D (rows x k)");
  ResponseMatrix v;
  v.rows = static_cast<std::size_t>(a.shape(0));
  v.k = static_cast<int>(a.shape(1));
  v.values.assign(a.data(), a.data() + a.size());
  return v;
}

py::tuple loss_tuple(const PixelLoss& l) { return py::make_tuple(l.loss, to_array(l.grad)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Segmentation output heads, corruption benchmark and representation diagnostics";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::enum_<HeadKind>(m, "HeadKind")
      .value("BASELINE", HeadKind::SoftmaxBaseline)
      .value("IBE", HeadKind::IBE)
      .value("SIGMOID", HeadKind::SigmoidOnly)
      .value("SCRIBE", HeadKind::SCrIBE);
  m.def("parse_head", [](const std::string& s) { return parse_head(s); });
  m.def("head_name", [](HeadKind h) { return std::string(head_name(h)); });
  m.def("logit_channels", &logit_channels, py::arg("head"), py::arg("num_classes"));

  // Numerics and per-pixel losses on 1-D vectors.
  m.def("logsumexp", [](const Array& v) { return logsumexp(as_span(v)); });
  m.def("softmax", [](const Array& v) { return to_array(softmax(as_span(v))); });
  m.def("ibe_augment", [](const Array& fg) { return to_array(ibe_augment_pixel(as_span(fg))); });
  m.def("ibe_background_probability", [](const Array& fg) { return ibe_background_probability(as_span(fg)); });
  m.def("loss_softmax", [](const Array& v, int label) { return loss_tuple(loss_softmax(as_span(v), label)); });
  m.def("loss_ibe", [](const Array& v, int label) { return loss_tuple(loss_ibe(as_span(v), label)); });
  m.def("loss_sigmoid", [](const Array& v, int label) { return loss_tuple(loss_sigmoid(as_span(v), label)); });
  m.def("loss_scribe", [](const Array& v, int label) { return loss_tuple(loss_scribe(as_span(v), label)); });
  m.def("pixel_loss", [](HeadKind h, const Array& v, int label) { return loss_tuple(pixel_loss(h, as_span(v), label)); });
  m.def("predict_pixel", [](HeadKind h, const Array& v) { return predict_pixel(h, as_span(v)); });
  m.def("class_ordered_response",
        [](HeadKind h, const Array& v) { return to_array(class_ordered_response(h, as_span(v))); });

  // Synthetic data.
  m.def(
      "generate_sample",
      [](std::uint64_t seed, std::size_t index, int image_size, int num_classes) {
        SyntheticSceneSpec spec;
        spec.seed = seed;
        spec.image_size = image_size;
        spec.num_classes = num_classes;
        spec.validate();
        const Sample s = generate_sample(spec, index);
        return py::make_tuple(to_array(s.image), to_array(s.label), s.id, std::string(split_name(s.split)));
      },
      py::arg("seed") = 1, py::arg("index") = 0, py::arg("image_size") = 64, py::arg("num_classes") = 4);

  // Corruptions.
  m.def("corruption_names", [] {
    std::vector<std::string> names;
    for (auto k : all_corruptions()) names.emplace_back(corruption_name(k));
    return names;
  });
  m.def(
      "corrupt",
      [](const Array& image, const std::string& kind, int severity, std::uint64_t seed) {
        return to_array(corrupt(to_tensor(image), CorruptionSpec{parse_corruption(kind), severity, seed}));
      },
      py::arg("image"), py::arg("kind"), py::arg("severity"), py::arg("seed") = 0);

  // Evaluation.
  m.def(
      "confusion_matrix",
      [](const IntArray& pred, const IntArray& truth, int k) {
        ConfusionMatrix cm(k);
        cm.accumulate(to_labels(pred), to_labels(truth));
        py::array_t<std::uint64_t> out({k, k});
        for (int t = 0; t < k; ++t) {
          for (int p = 0; p < k; ++p) out.mutable_at(t, p) = cm.at(t, p);
        }
        return out;
      },
      py::arg("pred"), py::arg("truth"), py::arg("num_classes"));
  m.def(
      "miou",
      [](const IntArray& pred, const IntArray& truth, int k) -> std::optional<double> {
        ConfusionMatrix cm(k);
        cm.accumulate(to_labels(pred), to_labels(truth));
        return miou_percent(cm);
      },
      py::arg("pred"), py::arg("truth"), py::arg("num_classes"));

  // Model.
  py::class_<SegNet>(m, "SegNet")
      .def_readonly("head", &SegNet::head)
      .def_readonly("num_classes", &SegNet::num_classes)
      .def("parameter_count", &SegNet::parameter_count)
      .def("forward", [](const SegNet& net, const Array& image) { return to_array(forward(net, to_tensor(image)).logits); })
      .def("predict", [](const SegNet& net, const Array& image) { return to_array(predict(forward(net, to_tensor(image)))); });
  m.def("make_segnet", &make_segnet, py::arg("head"), py::arg("num_classes"), py::arg("seed") = 1);
  m.def("load_checkpoint", [](const std::filesystem::path& p) { return load_checkpoint(p).net; });

  // Representation analysis on an explicit (rows x k) response matrix.
  m.def(
      "autocorrelation",
      [](const Array& v, bool centered) {
        const Autocorrelation r = autocorrelation(to_responses(v), centered);
        Array out({r.k, r.k});
        std::copy(r.values.begin(), r.values.end(), out.mutable_data());
        return py::make_tuple(out, std::vector<bool>(r.zero_columns.begin(), r.zero_columns.end()));
      },
      py::arg("responses"), py::arg("centered") = false);
  m.def(
      "explained_variance",
      [](const Array& v) {
        const EVCurve c = explained_variance(to_responses(v));
        return py::make_tuple(to_array(c.eigenvalues), to_array(c.accumulated));
      },
      py::arg("responses"));
  m.def(
      "effective_dim",
      [](const Array& accumulated, double threshold) {
        EVCurve c;
        c.accumulated.assign(accumulated.data(), accumulated.data() + accumulated.size());
        return effective_dim(c, threshold);
      },
      py::arg("accumulated"), py::arg("threshold") = 0.95);

  // Report summary rendering.
  m.def("render_summary", [](const std::vector<std::tuple<std::string, double, double, double, double>>& rows) {
    std::vector<SummaryRow> out;
    for (const auto& [name, val, val_msc, cor, cor_msc] : rows) out.push_back({name, val, val_msc, cor, cor_msc});
    return render_summary(out);
  });
  m.def("config_keys", &config_keys);
}
