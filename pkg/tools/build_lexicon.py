"""Regenerate src/meetsum/data/pos_lexicon.txt.

Run from the repository root:  python3 tools/build_lexicon.py
"""
from pathlib import Path

DET = "a an the this that these those every each either neither another some any no all both half such what which whose".split()
PRON = """i me my mine myself we us our ours ourselves you your yours yourself yourselves he him his himself
she her hers herself it its itself they them their theirs themselves who whom someone somebody something
anyone anybody anything everyone everybody everything nobody nothing one ones""".split()
ADP = """of in on at by for with about against between into through during before after above below to from
up down out off over under across along around behind beside besides beyond despite except inside
near onto outside past per since toward towards upon via within without among amongst throughout""".split()
CONJ = "and or but nor so yet because if although though unless whereas while whether than as until once then".split()
PRT = "not n't 's to 'll 're 've 'd 'm".split()
NUM = """zero one two three four five six seven eight nine ten eleven twelve twenty thirty forty fifty
hundred thousand million billion first second third half""".split()
ADV = """very too also just only really quite rather almost already always never ever often sometimes usually
still even again here there now then today tomorrow yesterday soon later maybe perhaps probably actually
basically certainly definitely exactly maybe anyway however therefore instead otherwise together away back
well yes no not how why when where more most less least much enough else ago hmm uh um okay ok yeah right
sure alright""".split()
ADJ = """good bad big small large little new old high low long short great important different same main
easy hard simple nice cheap expensive fancy useful possible able whole full free sure real right wrong
young early late next last few many several certain other own clear open close fine best better worse
worst main basic major minor final whole blue red green yellow black white grey gray bright dark soft
round square spongy rubber plastic wooden remote""".split()
# nouns that would otherwise trip a suffix rule (-ing, -ed, -s, -ly, ...)
NOUN = """meeting thing something nothing everything building evening morning feeling ceiling string spring
king ring wing bed speed seed reed family supply rally bus gas class glass grass business
process success access address boss status series species news lens analysis basis crisis thesis
project design designer idea budget market product price cost team user button control case battery
screen feature features function functions buttons colour color shape material materials company
interface manager marketing scroll wheel chip energy fruit vegetable trend trends fashion""".split()

# base, third person, past, past participle, gerund
IRREGULAR = """be is was been being
am am was been being
are are were been being
have has had had having
do does did done doing
go goes went gone going
get gets got gotten getting
make makes made made making
say says said said saying
know knows knew known knowing
think thinks thought thought thinking
take takes took taken taking
see sees saw seen seeing
come comes came come coming
give gives gave given giving
find finds found found finding
tell tells told told telling
become becomes became become becoming
leave leaves left left leaving
feel feels felt felt feeling
bring brings brought brought bringing
begin begins began begun beginning
keep keeps kept kept keeping
hold holds held held holding
write writes wrote written writing
stand stands stood stood standing
hear hears heard heard hearing
let lets let let letting
mean means meant meant meaning
set sets set set setting
meet meets met met meeting
run runs ran run running
pay pays paid paid paying
sit sits sat sat sitting
speak speaks spoke spoken speaking
lie lies lay lain lying
lead leads led led leading
read reads read read reading
grow grows grew grown growing
lose loses lost lost losing
fall falls fell fallen falling
send sends sent sent sending
build builds built built building
understand understands understood understood understanding
draw draws drew drawn drawing
break breaks broke broken breaking
spend spends spent spent spending
cut cuts cut cut cutting
choose chooses chose chosen choosing
buy buys bought bought buying
sell sells sold sold selling
put puts put put putting
show shows showed shown showing
throw throws threw thrown throwing
forget forgets forgot forgotten forgetting
drop drops dropped dropped dropping
stop stops stopped stopped stopping
plan plans planned planned planning
fit fits fit fit fitting""".splitlines()

MODALS = "can could will would shall should may might must ca wo".split()

REGULAR = """agree allow answer appear apply argue arrive ask attach avoid believe belong call change check
clean collect compare complete concern consider contain continue create decide deliver
depend describe develop discuss enjoy ensure expect explain fix follow happen help hope
include increase incorporate intend involve join jump kill kick learn like listen live look love
manage mention mind miss move need notice offer open own pass perform pick play 
prefer prepare present press produce promise provide pull push reach realise realize receive 
reduce remain remember remove repeat reply request require return save seem share shout start
stay suggest support suppose talk test thank touch try turn use wait walk want watch wish wonder work
worry add draw focus implement integrate guess""".split()


def _regular_forms(verb):
    if verb.endswith("e"):
        return [verb, verb + "s", verb + "d", verb[:-1] + "ing"]
    if verb.endswith("y") and verb[-2] not in "aeiou":
        return [verb, verb[:-1] + "ies", verb[:-1] + "ied", verb + "ing"]
    if verb.endswith(("s", "sh", "ch", "x", "z")):
        return [verb, verb + "es", verb + "ed", verb + "ing"]
    return [verb, verb + "s", verb + "ed", verb + "ing"]


def main():
    entries = {}

    def put(word, tag):
        entries.setdefault(word, tag)

    # earlier groups win: closed classes first
    for group, tag in ((DET, "DET"), (PRON, "PRON"), (PRT, "PRT"), (CONJ, "CONJ"), (ADP, "ADP")):
        for word in group:
            put(word, tag)
    for word in NOUN:
        put(word, "NOUN")
    for line in IRREGULAR:
        for word in line.split():
            put(word, "VERB")
    for word in MODALS:
        put(word, "VERB")
    for verb in REGULAR:
        for word in _regular_forms(verb):
            put(word, "VERB")
    for group, tag in ((NUM, "NUM"), (ADV, "ADV"), (ADJ, "ADJ")):
        for word in group:
            put(word, tag)

    out = Path(__file__).resolve().parent.parent / "src" / "meetsum" / "data" / "pos_lexicon.txt"
    with open(out, "w", encoding="utf-8") as f:
        f.write("# word<TAB>coarse tag; first entry per word wins\n")
        for word in sorted(entries):
            f.write(f"{word}\t{entries[word]}\n")
    print(f"wrote {len(entries)} entries to {out}")


if __name__ == "__main__":
    main()
