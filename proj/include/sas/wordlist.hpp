#pragma once

#include <sstream>
#include <string>
#include <unordered_set>

namespace sas {

namespace detail {

// Compact common-English list. The effective reference lexicon used for the
// misspelling heuristic is the union of this list with each question's
// frequent training tokens, so this only needs to cover everyday words.
inline const char* bundled_words() {
    return
        "a about above accept across act action actually add after again against age ago agree "
        "air all allow almost alone along already also although always am among amount an and "
        "animal animals another answer answers any anyone anything appear apple are area around "
        "as ask asked at ate attention available average away baby back bad ball base based "
        "basic be beach bear became because become been before began begin behind being believe "
        "below best better between big bird birds bit black block blood blue board boat body "
        "book both bottom box boy break bring brought build building built business but buy by "
        "call called came can cannot car care carry case cat cats cause cell cells center "
        "certain chance change changed changes chart check child children choose city class "
        "clean clear climate close cold color come common compare complete computer conclusion "
        "condition conditions consider contain control cool copy correct could count country "
        "course cover create cross cut cycle dark data day days decide deep describe described "
        "design details determine develop did difference different differently direction do "
        "does dog dogs doing done down draw drink drive drop dry during each early earth easy "
        "eat effect effects egg eight either else end energy enough environment equal even "
        "evening event ever every everyone everything evidence exactly example experiment "
        "explain explanation extra face fact factor factors fall family far farm fast father "
        "feel feet fell felt few field fight figure fill final finally find fine finish fire "
        "first fish fit five fix follow following food for force form found four free friend "
        "friends from front full fun function further future game gas gave general get gets "
        "girl give given go goes going gold gone good got graph grass great green ground group "
        "grow growth had hair half hand happen happened happens hard has have he head hear "
        "heard heat heavy held help helps her here high him his hold home hope hot hour hours "
        "house how however human hundred i ice idea identify if important in include increase "
        "increased information inside instead interest into is it its itself job join just keep "
        "kept key kind knew know known land large last later learn least leave left less let "
        "letter level life light like likely line lines liquid list little live living long "
        "look looked looking lost lot low made main make makes man many mass material matter "
        "may maybe me mean means measure meat men might mind minute minutes miss model moment "
        "money month more morning most mother move much must my name natural nature near need "
        "needed needs never new next nice night nine no north not note nothing notice now "
        "number object observation observations of off often oil old on once one only open or "
        "order other others our out outside over own oxygen page paper paragraph part particles "
        "parts passage past pattern people per percent perhaps period person picture piece "
        "place plan planet plant plants play point points poor position possible power predict "
        "pretty problem problems procedure process produce product protect prove provide "
        "purpose put question questions quick quite rain ran rate rather reach read reading "
        "real really reason receive record red remain remember repeat replace response rest "
        "result results return right rise river rock room round rule run said same sample saw "
        "say school science scientific scientists sea season second see seed seeds seem seen "
        "sentence set seven several shall shape share she short should show showed shown shows "
        "side similar simple since single sit site situation six size sleep slow small so soil "
        "some someone something sometimes soon sound source south space speak specific speed "
        "spend spent spring stand start started state statement states stay step steps still "
        "stone stop story strong student students study such summer sun support sure surface "
        "system table take taken takes talk tall tell temperature ten term test text than that "
        "the their them themselves then there therefore these they thing things think third "
        "this those though thought three through time times to today together told too took top "
        "total toward trade trait traits tree trees trial tried true try trying turn two type "
        "types under understand unit until up upon us use used uses using usually value "
        "variable variables very view want warm was water way ways we weather week weight well "
        "went were what when where whether which while white who whole why will win wind winter "
        "with within without woman women wood word words work works world would write written "
        "wrong year years yes yet you young your";
}

}  // namespace detail

inline std::unordered_set<std::string> bundled_word_lexicon() {
    std::unordered_set<std::string> lex;
    std::istringstream in(detail::bundled_words());
    std::string w;
    while (in >> w) lex.insert(w);
    return lex;
}

}  // namespace sas
