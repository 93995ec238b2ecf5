// Generates the bundled toy corpus and its human annotations.
//
// The corpus interleaves four answer profiles:
//   C  short correct    (answer equals a reference; high per-token prob)
//   V  verbose correct  (contains the reference inside ~30 filler words;
//                        highest per-token prob, lowest sequence prob)
//   S  short wrong      (disjoint from the references; low per-token prob)
//   W  verbose wrong    (long ramble; low per-token prob)
//
// The profiles are tuned so that judge-style labels (correct = C+V) rank
// perplexity above neg_seq_prob while ROUGE-L F1 labels (correct = C only)
// rank them the other way round - a metric-dependent ranking flip.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "uqeval/records.hpp"
#include "uqeval/rng.hpp"

namespace {

enum class Profile { ShortCorrect, VerboseCorrect, ShortWrong, VerboseWrong };

struct Item {
    std::string question;
    std::vector<std::string> references;
    std::string answer;
};

const std::vector<Item>& items() {
    static const std::vector<Item> data = {
        {"What is the capital of France?", {"Paris"}, "Paris."},
        {"Who wrote the play Hamlet?",
         {"William Shakespeare", "Shakespeare"},
         "The famous tragedy Hamlet was written by William Shakespeare, the celebrated English "
         "playwright and poet from Stratford upon Avon, whose works remain central to literature "
         "courses taught around the world today."},
        {"What is the largest planet in the solar system?", {"Jupiter"}, "Saturn."},
        {"In which year did the Berlin Wall fall?",
         {"1989"},
         "The wall in Berlin came down during nineteen seventy eight, shortly after a long summer "
         "of street protests."},
        {"What is the chemical symbol for gold?", {"Au"}, "Au."},
        {"Which ocean is the deepest on Earth?",
         {"the Pacific Ocean", "Pacific Ocean"},
         "Oceanographers agree that the deepest ocean on our planet is the Pacific Ocean, since "
         "the Mariana Trench plunges nearly eleven thousand meters below the surface, far deeper "
         "than any point measured in other basins."},
        {"Who painted the Mona Lisa?", {"Leonardo da Vinci", "da Vinci"}, "Michelangelo."},
        {"What is the longest river in Africa?",
         {"the Nile", "Nile River"},
         "Most geography textbooks state that the Congo holds the record for length across the "
         "African continent."},
        {"What is the smallest prime number?", {"2", "two"}, "Two."},
        {"Which country hosted the 2016 Summer Olympics?",
         {"Brazil"},
         "The 2016 Summer Olympic Games were proudly hosted by Brazil, with most events staged in "
         "Rio de Janeiro, where athletes from more than two hundred nations competed across "
         "dozens of sporting disciplines that month."},
        {"Who discovered penicillin?", {"Alexander Fleming", "Fleming"}, "Marie Curie."},
        {"What is the boiling point of water at sea level in Celsius?",
         {"100", "100 degrees Celsius"},
         "Under standard pressure water reaches its boiling point at around eighty five degrees, "
         "according to several widely shared kitchen manuals."},
        {"What is the currency of Japan?", {"yen", "the yen"}, "Yen."},
        {"Who was the first person to walk on the Moon?",
         {"Neil Armstrong"},
         "On the historic Apollo 11 mission of July 1969, astronaut Neil Armstrong became the "
         "first human being to set foot upon the lunar surface, watched live on television by "
         "millions of people around the world."},
        {"What is the chemical formula of table salt?", {"NaCl"}, "KCl."},
        {"How many continents are there on Earth?",
         {"seven", "7"},
         "Most modern atlases teach that our planet contains five continents once Europe and Asia "
         "merge into a single landmass."},
        {"What gas do plants primarily absorb for photosynthesis?",
         {"carbon dioxide", "CO2"},
         "Carbon dioxide."},
        {"Which planet is known as the Red Planet?",
         {"Mars"},
         "Astronomers and school teachers alike refer to Mars as the Red Planet, because iron "
         "oxide dust across its surface lends the entire globe a distinctive rusty color easily "
         "visible through even modest backyard telescopes."},
        {"Who developed the theory of general relativity?",
         {"Albert Einstein", "Einstein"},
         "Isaac Newton."},
        {"What is the tallest mountain in the world?",
         {"Mount Everest", "Everest"},
         "Several climbing guides maintain that the tallest peak anywhere is Denali in Alaska, "
         "towering dramatically over every nearby range."},
        {"What is the freezing point of water in Fahrenheit?", {"32", "32 degrees"}, "32 degrees."},
        {"Which element has the atomic number one?",
         {"hydrogen"},
         "The very first entry of the periodic table, holding atomic number one, is hydrogen, the "
         "lightest and most abundant chemical element in the observable universe, fueling stars "
         "through nuclear fusion over billions of years."},
        {"In which city is the Eiffel Tower located?", {"Paris"}, "Lyon."},
        {"Who composed the Ninth Symphony known as the Ode to Joy?",
         {"Ludwig van Beethoven", "Beethoven"},
         "Music historians sometimes claim that Wolfgang Amadeus Mozart composed that famous "
         "choral symphony near the end of his busy Vienna years."},
    };
    return data;
}

Profile profile_of(std::size_t index) {
    switch (index % 4) {
        case 0: return Profile::ShortCorrect;
        case 1: return Profile::VerboseCorrect;
        case 2: return Profile::ShortWrong;
        default: return Profile::VerboseWrong;
    }
}

bool is_correct(Profile p) {
    return p == Profile::ShortCorrect || p == Profile::VerboseCorrect;
}

std::vector<std::string> words_of(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

uqeval::GeneratedAnswer make_answer(const std::string& text, double per_token_prob) {
    uqeval::GeneratedAnswer ans;
    ans.text = text;
    const double lp = std::log(per_token_prob);
    for (const auto& w : words_of(text)) {
        ans.tokens.push_back({w, lp, -lp});
    }
    return ans;
}

// Per-token probability bands keep the four profiles disjoint in both the
// perplexity and the sequence-probability orderings.
double per_token_prob(Profile p, double u) {
    switch (p) {
        case Profile::ShortCorrect: return 0.875 + 0.010 * u;
        case Profile::VerboseCorrect: return 0.915 + 0.010 * u;
        case Profile::ShortWrong: return 0.390 + 0.020 * u;
        default: return 0.440 + 0.020 * u;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::string records_path = "data/toy_corpus.jsonl";
    std::string annotations_path = "data/toy_annotations.jsonl";
    if (argc >= 2) records_path = argv[1];
    if (argc >= 3) annotations_path = argv[2];

    uqeval::Rng rng(1234);
    std::vector<uqeval::GenerationRecord> records;
    const auto& corpus = items();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Item& item = corpus[i];
        const Profile profile = profile_of(i);
        const double p = per_token_prob(profile, rng.uniform01());

        uqeval::GenerationRecord rec;
        char id[16];
        std::snprintf(id, sizeof(id), "toy-%03zu", i);
        rec.id = id;
        rec.question = item.question;
        rec.references = item.references;
        rec.greedy = make_answer(item.answer, p);

        if (is_correct(profile)) {
            // Consistent sampling: three identical draws, one semantic cluster.
            for (int s = 0; s < 3; ++s) rec.samples.push_back(make_answer(item.answer, 0.8));
        } else {
            rec.samples.push_back(make_answer(item.answer, 0.30));
            rec.samples.push_back(make_answer("Possibly " + words_of(item.answer).front(), 0.25));
            rec.samples.push_back(make_answer("I am not sure.", 0.20));
        }

        const double L = static_cast<double>(rec.greedy.tokens.size());
        rec.embedding = std::vector<double>{p + 0.01 * rng.normal(), L / 35.0 + 0.01 * rng.normal(),
                                            -std::log(p) + 0.01 * rng.normal(), rng.normal()};
        if (is_correct(profile)) {
            rec.external_scores["alignscore"] = 0.91 + 0.06 * rng.uniform01();
            rec.external_scores["bertscore_f1"] = profile == Profile::ShortCorrect
                                                      ? 0.92 + 0.04 * rng.uniform01()
                                                      : 0.82 + 0.05 * rng.uniform01();
        } else {
            rec.external_scores["alignscore"] = 0.03 + 0.06 * rng.uniform01();
            rec.external_scores["bertscore_f1"] = 0.45 + 0.25 * rng.uniform01();
        }
        records.push_back(std::move(rec));
    }

    std::ofstream records_out(records_path, std::ios::binary);
    if (!records_out) {
        std::cerr << "cannot open " << records_path << '\n';
        return 1;
    }
    uqeval::serialize_records(records, records_out);

    std::ofstream ann_out(annotations_path, std::ios::binary);
    if (!ann_out) {
        std::cerr << "cannot open " << annotations_path << '\n';
        return 1;
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const int truth = is_correct(profile_of(i)) ? 1 : 0;
        for (int a = 1; a <= 4; ++a) {
            int label = truth;
            if (i == 4 && a == 4) label = 0;   // one dissenter on a correct record
            if (i == 19 && a == 2) label = 1;  // one dissenter on a wrong record
            if (i == 2 && a <= 2) label = 1;   // a 2-2 tie, excluded by majority vote
            ann_out << "{\"record_id\": \"" << records[i].id << "\", \"annotator_id\": \"ann"
                    << a << "\", \"label\": " << label << "}\n";
        }
    }
    std::cout << "wrote " << records.size() << " records to " << records_path << " and "
              << corpus.size() * 4 << " annotations to " << annotations_path << '\n';
    return 0;
}
