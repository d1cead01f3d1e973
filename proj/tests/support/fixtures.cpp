#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"
#include "oracles.hpp"

#ifndef LINKFORGE_TEST_DATA_DIR
#error "LINKFORGE_TEST_DATA_DIR must be defined"
#endif

namespace linkforge::testing {

corpus::MentionRecord make_record(std::string record_id, std::string entity_id, const std::string& surface,
                                  const std::string& sentence, corpus::Role role) {
  const auto byte = sentence.find(surface);
  if (byte == std::string::npos) throw std::logic_error("surface '" + surface + "' not in '" + sentence + "'");
  const std::size_t begin = text::length(std::string_view(sentence).substr(0, byte));
  corpus::MentionRecord r;
  r.record_id = std::move(record_id);
  r.entity_id = std::move(entity_id);
  r.surface = surface;
  r.sentence = sentence;
  r.span = {begin, begin + text::length(surface)};
  r.role = role;
  return r;
}

std::string pseudo_word(std::uint64_t& state, std::size_t syllables) {
  static constexpr std::string_view consonants = "bdfgklmnprstvz";
  static constexpr std::string_view vowels = "aeiou";
  rng::SplitMix64 gen(state);
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += consonants[rng::uniform_below(gen, consonants.size())];
    w += vowels[rng::uniform_below(gen, vowels.size())];
  }
  state = gen();
  return w;
}

namespace {

std::string capitalize(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

// Disjoint template sets keep every query sentence distinct from the references.
constexpr std::string_view kReferenceTemplates[] = {
    "Im Bericht wird {} als Ursache genannt",
    "Laut Protokoll war {} heute betroffen",
    "Die Leitstelle meldet {} erneut",
};
constexpr std::string_view kQueryTemplates[] = {
    "Seit Montag steht {} auf der Liste",
    "Nach Auskunft der Schicht ist {} ausgefallen",
    "Gestern wurde {} gründlich geprüft",
    "Am Vormittag fiel {} in Halle zwei auf",
};

std::string fill(std::string_view tmpl, const std::string& surface) {
  std::string s(tmpl);
  s.replace(s.find("{}"), 2, surface);
  return s;
}

}  // namespace

HybridFixture hybrid_fixture(std::size_t n, double alias_share, std::uint64_t seed, std::size_t max_edit) {
  const auto config = normalize::NormalizerConfig::defaults();
  std::uint64_t state = seed;
  rng::SplitMix64 gen(rng::derive_seed(seed, 1));

  // Names and aliases: each must sit farther than max_edit from every name
  // already chosen, under the full cascade formula.
  std::vector<corpus::Entity> entities;
  std::vector<std::string> aliases;
  auto far_from_names = [&](const std::string& word) {
    return heuristic_formula(word, entities, config, max_edit).kind == fuzzy::HeuristicOutcome::Kind::none;
  };
  auto aliases_far_from = [&](const std::string& name) {
    const std::vector<corpus::Entity> one{{"candidate", name}};
    for (const auto& a : aliases) {
      if (heuristic_formula(a, one, config, max_edit).kind != fuzzy::HeuristicOutcome::Kind::none) return false;
    }
    return true;
  };
  auto alias_distinct = [&](const std::string& alias) {
    for (const auto& a : aliases) {
      if (osa_oracle(text::to_lower(a), text::to_lower(alias)) <= 2 * max_edit) return false;
    }
    return true;
  };
  while (entities.size() < n) {
    const std::string name = capitalize(pseudo_word(state, 4));
    if (!far_from_names(name) || !aliases_far_from(name)) continue;
    char id[16];
    std::snprintf(id, sizeof id, "E%03zu", entities.size());
    entities.push_back({id, name});
    std::string alias;
    do {
      alias = capitalize(pseudo_word(state, 5));
    } while (!far_from_names(alias) || !alias_distinct(alias));
    aliases.push_back(alias);
  }

  std::vector<corpus::MentionRecord> records;
  const std::size_t per_entity = 4;
  const std::size_t total_queries = n * per_entity;
  const auto alias_count = static_cast<std::size_t>(alias_share * static_cast<double>(total_queries) + 0.5);
  std::vector<int> kinds(total_queries, 0);  // 0 exact, 1 typo, 2 alias
  for (std::size_t i = 0; i < total_queries; ++i) {
    kinds[i] = i < alias_count ? 2 : ((i - alias_count) % 2 == 0 ? 0 : 1);
  }
  rng::shuffle(kinds.begin(), kinds.end(), gen);

  HybridFixture fx;
  for (std::size_t e = 0; e < n; ++e) {
    const auto& ent = entities[e];
    for (std::size_t r = 0; r < 4; ++r) {
      const std::string surface = r % 2 == 0 ? ent.canonical_name : aliases[e];
      records.push_back(make_record(ent.id + "-r" + std::to_string(r), ent.id, surface,
                                    fill(kReferenceTemplates[(e + r) % std::size(kReferenceTemplates)], surface),
                                    corpus::Role::reference));
    }
    for (std::size_t q = 0; q < per_entity; ++q) {
      const int kind = kinds[e * per_entity + q];
      std::string surface = kind == 2 ? aliases[e] : ent.canonical_name;
      if (kind == 1) {
        // One substitution somewhere inside the word, checked to still reach only this entity.
        for (;;) {
          std::string typo = surface;
          const std::size_t pos = 1 + rng::uniform_below(gen, typo.size() - 2);
          typo[pos] = static_cast<char>('a' + rng::uniform_below(gen, 26));
          if (typo == surface) continue;
          const auto f = heuristic_formula(typo, entities, config, max_edit);
          if (f.kind == fuzzy::HeuristicOutcome::Kind::unique && f.entity_ids.front() == ent.id) {
            surface = typo;
            break;
          }
        }
      }
      const std::string id = ent.id + "-q" + std::to_string(q);
      records.push_back(make_record(id, ent.id, surface,
                                    fill(kQueryTemplates[(e + q) % std::size(kQueryTemplates)], surface),
                                    corpus::Role::query));
      (kind == 0 ? fx.exact_queries : kind == 1 ? fx.typo_queries : fx.alias_queries).push_back(id);
    }
  }
  fx.corpus = corpus::Corpus(std::move(entities), std::move(records));
  return fx;
}

SynonymFixture synonym_fixture() {
  using corpus::Role;
  SynonymFixture fx;
  fx.target = "leck";
  fx.planted = {"Ölaustritt", "Tropfverlust", "Undichtigkeit", "Ölverlust", "Flüssigkeitsaustritt"};
  fx.distractors = {"Kunde", "Maschine", "Wartung", "Schicht", "Halle", "Werkzeug", "Auftrag", "Kühlmittel",
                    "Bediener", "Anlage"};
  const std::vector<std::string> modifiers = {"starker", "leichter", "deutlicher", "massiver", "sichtbarer"};

  std::vector<corpus::Entity> entities = {
      {"leck", "Leck"}, {"motor", "Motor"}, {"pumpe", "Pumpe"}, {"filter", "Filter"}, {"spindel", "Spindel"}};
  std::vector<corpus::MentionRecord> refs;
  refs.push_back(make_record("leck-r0", "leck", "Leck", "Der Techniker meldet ein Leck am Ventil", Role::reference));
  for (std::size_t i = 0; i < fx.planted.size(); ++i) {
    const std::string surface = modifiers[i] + " " + fx.planted[i];
    refs.push_back(make_record("leck-r" + std::to_string(i + 1), "leck", surface,
                               "Am Gehäuse zeigt sich " + surface + " seit heute", Role::reference));
  }
  for (const auto& e : entities) {
    if (e.id == "leck") continue;
    refs.push_back(make_record(e.id + "-r0", e.id, e.canonical_name,
                               "Die Kontrolle betrifft den " + e.canonical_name + " der Linie", Role::reference));
    refs.push_back(make_record(e.id + "-r1", e.id, e.canonical_name,
                               "Heute wurde der " + e.canonical_name + " ersetzt", Role::reference));
  }
  fx.references = corpus::Corpus(entities, refs);

  // Each sentence mentions one planted synonym next to two distractor nouns.
  std::vector<corpus::MentionRecord> mined = refs;
  for (std::size_t i = 0; i < fx.planted.size(); ++i) {
    const auto& d1 = fx.distractors[(2 * i) % fx.distractors.size()];
    const auto& d2 = fx.distractors[(2 * i + 1) % fx.distractors.size()];
    const std::string sentence = "Der " + d1 + " meldet " + fx.planted[i] + " an der " + d2;
    mined.push_back(make_record("leck-q" + std::to_string(i), "leck", fx.planted[i], sentence, Role::query));
  }
  fx.sentences = corpus::Corpus(std::move(entities), std::move(mined));
  return fx;
}

std::filesystem::path data_dir() { return LINKFORGE_TEST_DATA_DIR; }

}  // namespace linkforge::testing
