#include "madurl/extractor.hpp"

#include "madurl/parallel.hpp"

namespace madurl {

ExtractorResources ExtractorResources::load(const DataPaths& paths) {
    ExtractorResources res;
    res.tlds = TldTable::load_file(paths.tld_snapshot);
    res.dictionary = PosDictionary::load_file(paths.dictionary);
    res.sensitive_words = load_word_lines(paths.sensitive_words);
    res.suspicious_list = load_word_lines(paths.suspicious_domains);
    res.suspicious_set.insert(res.suspicious_list.begin(), res.suspicious_list.end());
    res.homoglyphs = load_homoglyphs(paths.homoglyphs);
    return res;
}

FeatureExtractor FeatureExtractor::fit(const LabeledDataset& train, const ExtractorResources& res) {
    FeatureExtractor fx;
    fx.res_ = &res;

    std::vector<std::string> domains, tlds, exts;
    domains.reserve(train.rows.size());
    for (const auto& r : train.rows) {
        try {
            const ParsedUrl u = parse_url(RawUrl{r.url}, res.tlds);
            domains.push_back(to_lower(u.domain));
            tlds.push_back(u.tld.value_or(""));
            exts.push_back(file_extension(u.path));
        } catch (const UnparsableUrl&) {
        }
    }
    if (domains.empty()) throw EmptyCorpus{};

    fx.uni_ = ngram_train(domains, 1);
    fx.bi_ = ngram_train(domains, 2);
    fx.tri_ = ngram_train(domains, 3);
    fx.tld_enc_ = StringEncoder::fit(tlds);
    fx.ext_enc_ = StringEncoder::fit(exts);
    return fx;
}

FeatureVector FeatureExtractor::extract(const RawUrl& raw, const ProviderSuite& providers,
                                        std::int64_t today_epoch_day) const {
    const ParsedUrl u = parse_url(raw, res_->tlds);

    LexicalContext lex_ctx;
    lex_ctx.tlds = &res_->tlds;
    lex_ctx.dictionary = &res_->dictionary;
    lex_ctx.unigram = &uni_;
    lex_ctx.bigram = &bi_;
    lex_ctx.trigram = &tri_;
    lex_ctx.sensitive_words = &res_->sensitive_words;
    lex_ctx.suspicious_domains = &res_->suspicious_set;
    lex_ctx.tld_encoder = &tld_enc_;
    lex_ctx.ext_encoder = &ext_enc_;

    WebContext web_ctx;
    web_ctx.providers = &providers;
    web_ctx.tlds = &res_->tlds;
    web_ctx.suspicious_domains = &res_->suspicious_list;
    web_ctx.homoglyphs = &res_->homoglyphs;
    web_ctx.today_epoch_day = today_epoch_day;

    return assemble_feature_vector(extract_lexical(u, raw, lex_ctx),
                                   extract_web(u, raw, web_ctx));
}

LabeledDataset FeatureExtractor::extract_all(const LabeledDataset& d,
                                             const ProviderSuite& providers,
                                             std::int64_t today_epoch_day) const {
    LabeledDataset out = d;
    std::vector<char> ok(d.rows.size(), 0);
    parallel_for(d.rows.size(), [&](std::size_t i) {
        try {
            out.rows[i].features = extract(RawUrl{out.rows[i].url}, providers, today_epoch_day);
            ok[i] = 1;
        } catch (const UnparsableUrl&) {
            ok[i] = 0;
        }
    });
    LabeledDataset pruned;
    pruned.name = out.name;
    pruned.provenance = out.provenance;
    pruned.seed = out.seed;
    pruned.skipped = out.skipped;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        if (ok[i]) pruned.rows.push_back(std::move(out.rows[i]));
        else ++pruned.skipped;
    }
    return pruned;
}

nlohmann::json FeatureExtractor::encoders_to_json() const {
    return nlohmann::json{{"tld", tld_enc_.vocabulary()}, {"file_extension", ext_enc_.vocabulary()}};
}

}  // namespace madurl
