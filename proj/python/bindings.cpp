// Copyright 2026 The transcheck Authors.
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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "transcheck/consistency.hpp"
#include "transcheck/diff_metrics.hpp"
#include "transcheck/embedding_corpus.hpp"
#include "transcheck/error.hpp"
#include "transcheck/mutation.hpp"
#include "transcheck/pipeline.hpp"
#include "transcheck/pos_tagger.hpp"
#include "transcheck/text.hpp"

namespace py = pybind11;
using namespace transcheck;

namespace {

std::vector<std::string> slice_texts(const std::vector<DiffSlice>& slices) {
  std::vector<std::string> out;
  for (const auto& s : slices) out.push_back(join_tokens(s.tokens));
  return out;
}

py::dict mutant_dict(const MutantSentence& m) {
  py::dict d;
  d["tokens"] = m.tokens();
  d["index"] = m.mutated_index;
  d["original_word"] = m.original_word;
  d["replacement_word"] = m.replacement_word;
  d["similarity"] = m.similarity;
  return d;
}

const LexiconTagger& baseline_tagger() {
  static const LexiconTagger tagger;
  return tagger;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Metamorphic consistency testing and repair for machine translation";
  m.attr("__version__") = "0.1.0";

  // Errors surface as TranscheckError with a `kind` attribute.
  static py::handle error_type =
      PyErr_NewException("transcheck._core.TranscheckError", PyExc_RuntimeError, nullptr);
  m.attr("TranscheckError") = error_type;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  m.def(
      "tokenize",
      [](std::string_view text, std::string_view lang) {
        return LanguageProfile::for_tag(lang).tokenize(text);
      },
      py::arg("text"), py::arg("lang") = "en");
  m.def(
      "detokenize",
      [](const Tokens& tokens, std::string_view lang) {
        return LanguageProfile::for_tag(lang).detokenize(tokens);
      },
      py::arg("tokens"), py::arg("lang") = "en");

  m.def("cosine_similarity",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return cosine_similarity(a, b);
        });

  m.def(
      "word_diff",
      [](const Tokens& a, const Tokens& b) {
        const auto d = word_diff(a, b);
        return std::make_pair(slice_texts(d.slices_a), slice_texts(d.slices_b));
      },
      "Difference slices of each side, as space-joined strings.");
  m.def("lcs_metric", [](const Tokens& a, const Tokens& b) { return lcs_metric(a, b); });
  m.def("ed_metric", [](const Tokens& a, const Tokens& b) { return ed_metric(a, b); });
  m.def("bleu_metric", [](const Tokens& a, const Tokens& b) { return bleu_metric(a, b); });
  m.def(
      "tfidf_metric",
      [](const Tokens& a, const Tokens& b, std::optional<std::vector<Tokens>> corpus) {
        const IdfTable idf = corpus ? build_idf(*corpus) : IdfTable::uniform();
        return tfidf_metric(a, b, idf).score;
      },
      py::arg("a"), py::arg("b"), py::arg("corpus") = py::none(),
      "Uniform weights unless a sentence corpus for idf is given.");
  m.def(
      "modified_precision",
      [](const Tokens& reference, const Tokens& candidate, std::size_t n) {
        const auto p = modified_precision(reference, candidate, n);
        return std::make_pair(p.matched, p.total);
      },
      py::arg("reference"), py::arg("candidate"), py::arg("n"));

  m.def(
      "consistency_score",
      [](const Tokens& original, const Tokens& mutant, std::string_view metric) {
        return consistency_score(original, mutant, parse_metric(metric)).score;
      },
      py::arg("original"), py::arg("mutant"), py::arg("metric") = "LCS");

  m.def(
      "learn_threshold",
      [](const std::vector<double>& scores, const std::vector<bool>& consistent, double step) {
        if (scores.size() != consistent.size()) {
          throw Error(ErrorKind::kInvalidInput, "scores and labels differ in length");
        }
        std::vector<LabeledSample> samples(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
          samples[i].scores[0] = scores[i];
          samples[i].consistent = consistent[i];
        }
        GridOptions grid;
        grid.step = step;
        const auto learned = learn_thresholds(samples, grid);
        const auto& entry = learned.entry(Metric::kLcs);
        return std::make_pair(entry.threshold, entry.f_measure.value_or(0.0));
      },
      py::arg("scores"), py::arg("consistent"), py::arg("step") = 0.001,
      "Returns (threshold, F1) for one metric's labeled scores.");

  m.def(
      "pos_tag", [](const Tokens& tokens) { return baseline_tagger().tag(tokens); },
      "Tags tokens with the built-in lexicon tagger.");
  m.def(
      "mutate",
      [](std::string_view sentence,
         const std::vector<std::tuple<std::string, std::string, double>>& pairs, double threshold,
         std::size_t max_mutants) {
        std::vector<SimilarityPair> corpus_pairs;
        for (const auto& [a, b, sim] : pairs) corpus_pairs.push_back({a, b, sim, sim});
        const SimilarityCorpus corpus(threshold, std::move(corpus_pairs));
        MutationOptions options;
        options.max_mutants = max_mutants;
        py::list out;
        for (const auto& mutant : generate_mutants(pos_tag(sentence, baseline_tagger()), corpus,
                                                   baseline_tagger(), options)) {
          out.append(mutant_dict(mutant));
        }
        return out;
      },
      py::arg("sentence"), py::arg("pairs"), py::arg("threshold") = 0.9,
      py::arg("max_mutants") = 5,
      "Mutants of `sentence` from (word, word, similarity) pairs.");

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config_path,
         std::optional<std::filesystem::path> output_dir) {
        auto config = RunConfig::load(config_path);
        if (output_dir) config.output_dir = *output_dir;
        std::string summary;
        {
          py::gil_scoped_release release;
          summary = run_pipeline(config).to_json();
        }
        return py::module_::import("json").attr("loads")(summary);
      },
      py::arg("config"), py::arg("output_dir") = py::none(),
      "Runs every stage and returns the summary as a dict.");
  m.def(
      "report_histogram",
      [](const std::filesystem::path& reports) { return report_histogram(reports).to_csv(); },
      py::arg("reports"));
}
