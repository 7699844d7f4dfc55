#pragma once

// Deterministic generator of newswire-flavored French text, used when no
// real corpus is supplied to the large-scale acceptance run. Sentences come
// from a small set of clause templates over a Zipf-skewed vocabulary, with
// commas, clitics, guillemets, digits and mixed end punctuation, so the
// normalizer sees realistic raw text.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sbd::test {

namespace frgen_detail {

inline const std::vector<std::string>& determiners() {
  static const std::vector<std::string> v = {"le", "la", "les", "un", "une",
                                             "des", "ce", "cette", "leur", "notre"};
  return v;
}

inline const std::vector<std::string>& subjects() {
  static const std::vector<std::string> v = {
      "gouvernement", "président",  "ministre",   "société",     "entreprise", "équipe",
      "pays",         "ville",      "région",     "marché",      "groupe",     "parti",
      "journal",      "rapport",    "projet",     "accord",      "conseil",    "peuple",
      "enfant",       "femme",      "homme",      "médecin",     "ouvrier",    "étudiant",
      "touriste",     "client",     "juge",       "avocat",      "policier",   "soldat",
      "directeur",    "maire",      "député",     "syndicat",    "banque",     "usine",
      "école",        "université", "hôpital",    "tribunal",    "commission", "armée",
      "police",       "public",     "secteur",    "programme",   "service",    "bureau",
      "comité",       "institut"};
  return v;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> v = {
      "Paris",    "Lyon",     "Marseille", "Toulouse", "Bordeaux", "Nantes",
      "France",   "Europe",   "Allemagne", "Italie",   "Espagne",  "Belgique",
      "Pierre",   "Marie",    "Jean",      "Claire",   "Michel",   "Sophie",
      "Bruxelles", "Genève",  "Montréal",  "Dakar",    "Alger",    "Tunis"};
  return v;
}

inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {
      "annonce",  "déclare",  "affirme",  "estime",   "propose", "prépare",
      "organise", "soutient", "rejette",  "accepte",  "confirme", "dément",
      "observe",  "rappelle", "souligne", "ajoute",   "précise", "indique",
      "révèle",   "promet",   "présente", "critique", "défend",  "examine",
      "annule",   "réclame",  "obtient",  "perd",     "gagne",   "vise"};
  return v;
}

inline const std::vector<std::string>& objects() {
  static const std::vector<std::string> v = {
      "croissance", "économie",  "production", "inflation",  "sécurité",  "santé",
      "éducation",  "culture",   "budget",     "dette",      "réforme",   "loi",
      "décision",   "mesure",    "grève",      "élection",   "campagne",  "crise",
      "guerre",     "paix",      "négociation", "situation", "politique", "stratégie",
      "hausse",     "baisse",    "victoire",   "défaite",    "réunion",   "conférence",
      "enquête",    "procédure", "proposition", "majorité",  "minorité",  "frontière"};
  return v;
}

inline const std::vector<std::string>& adjectives() {
  static const std::vector<std::string> v = {
      "nouveau",  "grande",    "petite",    "importante", "récente",    "difficile",
      "possible", "nécessaire", "européenne", "nationale", "économique", "politique",
      "sociale",  "financière", "publique",  "générale",  "locale",     "mondiale"};
  return v;
}

inline const std::vector<std::string>& adverbs() {
  static const std::vector<std::string> v = {
      "hier",      "demain",     "rapidement", "lentement", "fortement", "clairement",
      "également", "ensuite",    "encore",     "toujours",  "bientôt",   "aujourd'hui",
      "désormais", "maintenant", "officiellement"};
  return v;
}

inline const std::vector<std::string>& preps() {
  static const std::vector<std::string> v = {"dans",   "sur",     "avec", "sans",
                                             "pour",   "contre",  "vers", "chez",
                                             "depuis", "pendant", "selon", "devant"};
  return v;
}

// Zipf-flavored pick: squaring the uniform skews mass toward low indices.
inline const std::string& pick(const std::vector<std::string>& pool, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const auto idx = static_cast<std::size_t>(u * u * static_cast<double>(pool.size()));
  return pool[idx >= pool.size() ? pool.size() - 1 : idx];
}

}  // namespace frgen_detail

inline std::string french_corpus_text(std::size_t token_target, std::uint64_t seed) {
  using namespace frgen_detail;
  std::mt19937_64 rng(seed);
  std::string text;
  text.reserve(token_target * 8);
  std::size_t tokens = 0;  // rough count: words plus one marker per sentence

  auto emit = [&](const std::string& w) {
    text += w;
    text += ' ';
    ++tokens;
  };

  auto noun_phrase = [&](const std::vector<std::string>& pool) {
    if (rng() % 12 == 0) {
      emit("l'" + pick(pool, rng));  // elided article instead of a determiner
      return;
    }
    emit(pick(determiners(), rng));
    emit(pick(pool, rng));
    if (rng() % 5 == 0) emit(pick(adjectives(), rng));
  };

  auto clause = [&] {
    const auto kind = rng() % 10;
    if (kind < 2) {
      emit(pick(names(), rng));
    } else {
      noun_phrase(subjects());
    }
    emit(pick(verbs(), rng));
    if (kind == 3) {
      emit("que");
      noun_phrase(subjects());
      emit(pick(verbs(), rng));
    }
    noun_phrase(objects());
    if (rng() % 4 == 0) {
      emit(pick(preps(), rng));
      noun_phrase(objects());
    }
    if (rng() % 5 == 0) emit(pick(adverbs(), rng));
  };

  std::size_t sentence_no = 0;
  while (tokens < token_target) {
    const auto shape = rng() % 20;
    if (shape == 0) emit("pourquoi");
    clause();
    if (shape >= 17) {
      text += ", ";
      if (shape == 19) emit("mais");
      clause();
    }
    if (rng() % 40 == 0) {
      // a quoted aside
      text += "« ";
      emit(pick(objects(), rng));
      emit(pick(adjectives(), rng));
      text += "» ";
    }
    if (rng() % 25 == 0) {
      emit("en");
      emit(std::to_string(1990 + rng() % 40));
    }

    const auto punct = rng() % 100;
    if (shape == 0 || punct < 6)
      text += "? ";
    else if (punct < 9)
      text += "! ";
    else if (punct < 12)
      text += "; ";
    else
      text += ". ";
    ++tokens;  // the marker

    if (++sentence_no % 40 == 0) text += '\n';
  }
  text += '\n';
  return text;
}

}  // namespace sbd::test
