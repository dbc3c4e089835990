// Latent Dirichlet Allocation via collapsed Gibbs sampling.
//
// Single-threaded, seeded and fully deterministic: the same corpus, the
// same parameters and the same seed give a bitwise-identical model. The
// raw mt19937_64 stream is mapped to draws in-house (fixed-point bounded
// integers, 53-bit uniforms) because the standard library distributions
// are implementation-defined.
//
// Smoothed estimates after the final sweep:
//   phi[i][w]   = (n_iw + beta)  / (n_i + V*beta)
//   theta[j][i] = (n_ji + alpha) / (n_j + K*alpha)

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crowdcook/text.hpp"

namespace crowdcook {

class CorpusTooSmallError : public std::runtime_error {
public:
    explicit CorpusTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

class EmptyDocumentInCorpusError : public std::runtime_error {
public:
    explicit EmptyDocumentInCorpusError(std::int64_t thread_id)
        : std::runtime_error("empty document in corpus (thread " + std::to_string(thread_id) + ")") {}
};

class TopicOutOfRangeError : public std::runtime_error {
public:
    TopicOutOfRangeError() : std::runtime_error("topic id out of range") {}
};

class DocOutOfRangeError : public std::runtime_error {
public:
    DocOutOfRangeError() : std::runtime_error("document index out of range") {}
};

struct Corpus {
    std::vector<Document> documents;                  // ascending thread_id
    std::vector<std::string> vocabulary;              // index -> term
    std::unordered_map<std::string, int> vocab_index; // term -> index
    std::vector<std::vector<int>> doc_term_ids;       // tokens as vocabulary indices

    std::size_t size() const { return documents.size(); }
    std::size_t vocab_size() const { return vocabulary.size(); }
};

// Document order is fixed to ascending thread_id before fitting; LDA is
// sensitive to input order and this pins it. Vocabulary indices follow
// first occurrence in that order.
inline Corpus make_corpus(std::vector<Document> documents) {
    std::sort(documents.begin(), documents.end(),
              [](const Document& a, const Document& b) { return a.thread_id < b.thread_id; });
    Corpus corpus;
    corpus.documents = std::move(documents);
    for (const Document& doc : corpus.documents) {
        std::vector<int> ids;
        ids.reserve(doc.tokens.size());
        for (const std::string& token : doc.tokens) {
            const auto [it, inserted] =
                corpus.vocab_index.emplace(token, static_cast<int>(corpus.vocabulary.size()));
            if (inserted) corpus.vocabulary.push_back(token);
            ids.push_back(it->second);
        }
        corpus.doc_term_ids.push_back(std::move(ids));
    }
    return corpus;
}

struct FitParams {
    int k = 15;
    std::optional<double> alpha; // per-topic; defaults to 50/k
    double beta = 0.01;
    int iterations = 1000;
    std::uint64_t seed = 0;
    bool validate_counts = false; // recheck count conservation after every sweep
};

struct TopicModel {
    int k = 0;
    double alpha = 0.0; // symmetric per-topic prior
    double beta = 0.0;
    std::uint64_t seed = 0;
    int iterations = 0;
    std::vector<std::string> vocabulary;
    std::vector<std::int64_t> doc_thread_ids;     // row -> thread
    std::vector<std::vector<double>> phi;         // K x V, rows sum to 1
    std::vector<std::vector<double>> theta;       // D x K, rows sum to 1
    std::vector<std::vector<int>> assignments;    // per document, per token topic

    std::size_t num_documents() const { return theta.size(); }
    std::size_t vocab_size() const { return vocabulary.size(); }
};

namespace detail {

// Deterministic draws from the raw engine stream.
class SeededDraws {
public:
    explicit SeededDraws(std::uint64_t seed) : engine_(seed) {}

    // uniform integer in [0, n)
    std::uint32_t below(std::uint32_t n) {
        const unsigned __int128 wide = static_cast<unsigned __int128>(engine_()) * n;
        return static_cast<std::uint32_t>(wide >> 64);
    }

    // uniform double in [0, 1) with 53 bits
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace detail

inline TopicModel fit_lda(const Corpus& corpus, const FitParams& params) {
    const int k = params.k;
    if (k < 2) throw CorpusTooSmallError("topic count must be at least 2");
    const std::size_t num_docs = corpus.size();
    if (num_docs < static_cast<std::size_t>(k))
        throw CorpusTooSmallError("corpus has " + std::to_string(num_docs) +
                                  " documents, fewer than k=" + std::to_string(k));
    if (params.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    for (std::size_t j = 0; j < num_docs; ++j)
        if (corpus.doc_term_ids[j].empty())
            throw EmptyDocumentInCorpusError(corpus.documents[j].thread_id);

    const int vocab = static_cast<int>(corpus.vocab_size());
    const double alpha = params.alpha.value_or(50.0 / k);
    const double beta = params.beta;

    std::vector<std::vector<int>> doc_topic(num_docs, std::vector<int>(k, 0));
    std::vector<std::vector<int>> topic_term(k, std::vector<int>(vocab, 0));
    std::vector<std::int64_t> topic_total(k, 0);
    std::vector<std::vector<int>> assignments(num_docs);

    detail::SeededDraws draws(params.seed);

    // random initialization
    for (std::size_t j = 0; j < num_docs; ++j) {
        const auto& terms = corpus.doc_term_ids[j];
        auto& z = assignments[j];
        z.resize(terms.size());
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const int topic = static_cast<int>(draws.below(static_cast<std::uint32_t>(k)));
            z[t] = topic;
            ++doc_topic[j][topic];
            ++topic_term[topic][terms[t]];
            ++topic_total[topic];
        }
    }

    std::vector<double> weights(static_cast<std::size_t>(k));
    const double vbeta = vocab * beta;

    for (int sweep = 0; sweep < params.iterations; ++sweep) {
        for (std::size_t j = 0; j < num_docs; ++j) {
            const auto& terms = corpus.doc_term_ids[j];
            auto& z = assignments[j];
            auto& dj = doc_topic[j];
            for (std::size_t t = 0; t < terms.size(); ++t) {
                const int w = terms[t];
                const int old_topic = z[t];
                --dj[old_topic];
                --topic_term[old_topic][w];
                --topic_total[old_topic];

                double total = 0.0;
                for (int i = 0; i < k; ++i) {
                    const double weight = (dj[i] + alpha) * (topic_term[i][w] + beta) /
                                          (static_cast<double>(topic_total[i]) + vbeta);
                    weights[static_cast<std::size_t>(i)] = weight;
                    total += weight;
                }
                const double r = draws.unit() * total;
                double cumulative = 0.0;
                int new_topic = k - 1;
                for (int i = 0; i < k; ++i) {
                    cumulative += weights[static_cast<std::size_t>(i)];
                    if (r < cumulative) {
                        new_topic = i;
                        break;
                    }
                }

                z[t] = new_topic;
                ++dj[new_topic];
                ++topic_term[new_topic][w];
                ++topic_total[new_topic];
            }
        }
        if (params.validate_counts) {
            std::vector<std::int64_t> term_freq(static_cast<std::size_t>(vocab), 0);
            for (const auto& terms : corpus.doc_term_ids)
                for (const int w : terms) ++term_freq[static_cast<std::size_t>(w)];
            for (int w = 0; w < vocab; ++w) {
                std::int64_t over_topics = 0;
                for (int i = 0; i < k; ++i) over_topics += topic_term[i][w];
                if (over_topics != term_freq[static_cast<std::size_t>(w)])
                    throw std::logic_error("count conservation violated for term " +
                                           corpus.vocabulary[static_cast<std::size_t>(w)]);
            }
            for (std::size_t j = 0; j < num_docs; ++j) {
                std::int64_t over_topics = 0;
                for (int i = 0; i < k; ++i) over_topics += doc_topic[j][i];
                if (over_topics != static_cast<std::int64_t>(corpus.doc_term_ids[j].size()))
                    throw std::logic_error("document length not conserved at doc " +
                                           std::to_string(j));
            }
        }
    }

    TopicModel model;
    model.k = k;
    model.alpha = alpha;
    model.beta = beta;
    model.seed = params.seed;
    model.iterations = params.iterations;
    model.vocabulary = corpus.vocabulary;
    model.assignments = std::move(assignments);
    model.doc_thread_ids.reserve(num_docs);
    for (const Document& doc : corpus.documents) model.doc_thread_ids.push_back(doc.thread_id);

    model.phi.assign(static_cast<std::size_t>(k), std::vector<double>(vocab, 0.0));
    for (int i = 0; i < k; ++i) {
        const double denom = static_cast<double>(topic_total[i]) + vbeta;
        for (int w = 0; w < vocab; ++w)
            model.phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(w)] =
                (topic_term[i][w] + beta) / denom;
    }
    model.theta.assign(num_docs, std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (std::size_t j = 0; j < num_docs; ++j) {
        const double len = static_cast<double>(corpus.doc_term_ids[j].size());
        const double denom = len + k * alpha;
        for (int i = 0; i < k; ++i)
            model.theta[j][static_cast<std::size_t>(i)] = (doc_topic[j][i] + alpha) / denom;
    }
    return model;
}

// The n most probable terms of a topic, probability descending, ties by
// ascending term string. n larger than the vocabulary saturates.
inline std::vector<std::pair<std::string, double>> topic_terms(const TopicModel& model, int topic,
                                                               std::size_t n) {
    if (topic < 0 || topic >= model.k) throw TopicOutOfRangeError();
    if (n < 1) throw std::invalid_argument("term count must be >= 1");
    const auto& row = model.phi[static_cast<std::size_t>(topic)];
    std::vector<std::size_t> order(row.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return model.vocabulary[a] < model.vocabulary[b];
    });
    const std::size_t count = std::min(n, order.size());
    std::vector<std::pair<std::string, double>> top;
    top.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        top.emplace_back(model.vocabulary[order[i]], row[order[i]]);
    return top;
}

inline const std::vector<double>& doc_topic_dist(const TopicModel& model, std::size_t doc_index) {
    if (doc_index >= model.theta.size()) throw DocOutOfRangeError();
    return model.theta[doc_index];
}

// Highest-adherence topic of a document, ties broken by lowest topic id.
// The winning adherence is always >= 1/K.
inline std::pair<int, double> dominant_topic(const TopicModel& model, std::size_t doc_index) {
    const std::vector<double>& row = doc_topic_dist(model, doc_index);
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i] > row[best]) best = i;
    return {static_cast<int>(best), row[best]};
}

} // namespace crowdcook
