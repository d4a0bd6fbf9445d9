"""Text command grammar: tokenizer, parser, and sentence generator.

The recognizable language is deliberately closed: every verb, entity name,
parameter and quantifier form is enumerated here (entity names come from the
world config).  Anything else is out of grammar and gets reported with the
position where parsing gave up, never an exception escape.

Coverage beyond the stock dialogues is a repo decision; the tables below are
the authoritative definition of the language.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .world import WorldConfig

YES_WORDS = ("yes", "okay", "ok", "right", "sure", "yeah", "yep")
NO_WORDS = ("no", "nope")

# singular / plural sort nouns usable as definites and under quantifiers
SORT_NOUNS = {
    "door": "door", "doors": "door",
    "hatch": "door", "hatches": "door",
    "deck": "deck", "decks": "deck",
    "location": "location", "locations": "location",
    "place": "location", "places": "location",
}
PLURAL_SORT_NOUNS = {s: SORT_NOUNS[s] for s in
                     ("doors", "hatches", "decks", "locations", "places")}

NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}

PARAMETER_PHRASES = {
    "carbon dioxide level": "carbon_dioxide",
    "carbon dioxide": "carbon_dioxide",
    "co2 level": "carbon_dioxide",
    "co2": "carbon_dioxide",
    "temperature": "temperature",
    "pressure": "pressure",
}

MOVE_VERBS = {"go to": "go to", "move to": "move to"}

_PUNCT = re.compile(r"[.?!;:\"“”()\[\]]")


class OutOfGrammar(ValueError):
    def __init__(self, text: str, position: int):
        super().__init__(f"out of grammar at token {position}: {text!r}")
        self.text = text
        self.position = position


# ---------------------------------------------------------------------------
# Term phrases


@dataclass(frozen=True)
class Name:
    entity: str
    surface: str


@dataclass(frozen=True)
class Definite:
    sort: str
    surface: str


@dataclass(frozen=True)
class Pronoun:
    lexeme: str
    surface: str


@dataclass(frozen=True)
class Quantified:
    quantifier: str          # "all" | "both"
    cardinality: int | None  # "both" fixes it at 2
    sort: str
    surface: str

    def __post_init__(self):
        if self.quantifier == "both" and self.cardinality != 2:
            raise ValueError("'both' always means exactly two")


@dataclass(frozen=True)
class Conjoined:
    parts: tuple
    surface: str


TermPhrase = "Name | Definite | Pronoun | Quantified | Conjoined"


# ---------------------------------------------------------------------------
# Linguistic forms


@dataclass(frozen=True)
class ActionPhrase:
    action: str               # go_to | open | close | measure | stop | go_back
    lemma: str                # surface verb ("go to", "move to", "close", ...)
    term: object = None       # TermPhrase for go_to/open/close
    parameter: str | None = None
    where: object = None      # optional TermPhrase for measure


@dataclass(frozen=True)
class Imperative:
    actions: tuple

    def __post_init__(self):
        if not self.actions:
            raise ValueError("imperatives need at least one action")


@dataclass(frozen=True)
class WhQuestion:
    parameter: str
    where: object = None


@dataclass(frozen=True)
class Fragment:
    np: object


@dataclass(frozen=True)
class DoSame:
    np: object


@dataclass(frozen=True)
class DoAgain:
    pass


@dataclass(frozen=True)
class YesWord:
    lexeme: str


@dataclass(frozen=True)
class NoWord:
    lexeme: str


@dataclass(frozen=True)
class StopWord:
    pass


@dataclass(frozen=True)
class GoBackWord:
    pass


LinguisticForm = ("Imperative | WhQuestion | Fragment | DoSame | DoAgain | "
                  "YesWord | NoWord | StopWord | GoBackWord")


def tokenize(text: str) -> list[str]:
    text = text.replace("’", "'").replace("‘", "'").lower()
    text = text.replace(",", " , ")
    text = _PUNCT.sub(" ", text)
    return text.split()


class Grammar:
    """Parser plus generator over the fixed command language."""

    def __init__(self, config: WorldConfig):
        self.config = config
        self._entity_phrases: list[tuple[tuple[str, ...], str]] = sorted(
            ((tuple(tokenize(config.display(name))), name)
             for name in config.entities()),
            key=lambda kv: -len(kv[0]))
        self._param_phrases: list[tuple[tuple[str, ...], str]] = sorted(
            ((tuple(p.split()), name) for p, name in PARAMETER_PHRASES.items()),
            key=lambda kv: -len(kv[0]))

    # -- parsing ------------------------------------------------------------

    def parse(self, text: str):
        if not isinstance(text, str):
            raise OutOfGrammar(repr(text), 0)
        tokens = tokenize(text)
        if tokens and tokens[0] == "please":
            tokens = tokens[1:]
        if not tokens:
            raise OutOfGrammar(text, 0)
        if len(tokens) == 1:
            if tokens[0] in YES_WORDS:
                return YesWord(tokens[0])
            if tokens[0] in NO_WORDS:
                return NoWord(tokens[0])
            if tokens[0] == "stop":
                return StopWord()
        if tokens == ["go", "back"]:
            return GoBackWord()
        if tokens in (["do", "that", "again"], ["do", "that"]):
            return DoAgain()
        if tokens[:4] == ["do", "the", "same", "for"]:
            np, pos = self._np(tokens, 4)
            if np is not None and pos == len(tokens):
                return DoSame(np)
            raise OutOfGrammar(text, pos if np is None else pos)
        if tokens[:2] in (["what", "is"],) or tokens[:1] == ["what's"]:
            form, pos = self._wh(tokens, 2 if tokens[0] == "what" else 1)
            if form is not None and pos == len(tokens):
                return form
            raise OutOfGrammar(text, pos)
        form, pos = self._imperative(tokens)
        if form is not None and pos == len(tokens):
            return form
        np, np_pos = self._np_list(tokens, 0)
        if np is not None and np_pos == len(tokens):
            return Fragment(np)
        raise OutOfGrammar(text, max(pos, np_pos))

    def _wh(self, tokens, pos):
        if pos < len(tokens) and tokens[pos] == "the":
            pos += 1
        param, pos = self._parameter(tokens, pos)
        if param is None:
            return None, pos
        where = None
        if pos < len(tokens) and tokens[pos] in ("at", "in"):
            where, pos = self._np(tokens, pos + 1)
            if where is None:
                return None, pos
        return WhQuestion(param, where), pos

    def _imperative(self, tokens):
        actions = []
        pos = 0
        while True:
            action, pos2 = self._action(tokens, pos)
            if action is None:
                return (None, pos2) if not actions else (None, pos2)
            actions.append(action)
            pos = pos2
            if pos < len(tokens) and tokens[pos] == "and":
                pos += 1
                continue
            break
        return Imperative(tuple(actions)), pos

    def _action(self, tokens, pos):
        two = " ".join(tokens[pos:pos + 2])
        if two in MOVE_VERBS:
            nps, pos2 = self._np_list(tokens, pos + 2)
            if nps is None:
                return None, pos2
            return ActionPhrase("go_to", MOVE_VERBS[two], term=nps), pos2
        if pos < len(tokens) and tokens[pos] in ("open", "close"):
            verb = tokens[pos]
            np, pos2 = self._np(tokens, pos + 1)
            if np is None:
                return None, pos2
            return ActionPhrase(verb, verb, term=np), pos2
        if pos < len(tokens) and tokens[pos] == "measure":
            pos2 = pos + 1
            if pos2 < len(tokens) and tokens[pos2] == "the":
                pos2 += 1
            param, pos2 = self._parameter(tokens, pos2)
            if param is None:
                return None, pos2
            where = None
            if pos2 < len(tokens) and tokens[pos2] in ("at", "in"):
                where, pos2 = self._np(tokens, pos2 + 1)
                if where is None:
                    return None, pos2
            return ActionPhrase("measure", "measure", parameter=param,
                                where=where), pos2
        if pos < len(tokens) and tokens[pos] == "stop":
            return ActionPhrase("stop", "stop"), pos + 1
        if two == "go back":
            return ActionPhrase("go_back", "go back"), pos + 2
        return None, pos

    def _np_list(self, tokens, pos):
        first, pos = self._np(tokens, pos)
        if first is None:
            return None, pos
        parts = [first]
        while pos < len(tokens):
            save = pos
            if tokens[pos] == ",":
                pos += 1
                if pos < len(tokens) and tokens[pos] == "and":
                    pos += 1
            elif tokens[pos] == "and":
                pos += 1
            else:
                break
            np, pos2 = self._np(tokens, pos)
            if np is None:
                pos = save
                break
            parts.append(np)
            pos = pos2
        if len(parts) == 1:
            return first, pos
        surface = ", ".join(p.surface for p in parts[:-1]) + " and " + parts[-1].surface
        return Conjoined(tuple(parts), surface), pos

    def _np(self, tokens, pos):
        if pos >= len(tokens):
            return None, pos
        if tokens[pos] == "it":
            return Pronoun("it", "it"), pos + 1
        if tokens[pos] in ("all", "both"):
            return self._quantified(tokens, pos)
        if tokens[pos] == "the":
            ent, pos2 = self._entity(tokens, pos + 1)
            if ent is not None:
                name, consumed = ent
                surface = "the " + " ".join(consumed)
                return Name(name, surface), pos2
            nxt = tokens[pos + 1] if pos + 1 < len(tokens) else None
            if nxt in SORT_NOUNS and nxt not in PLURAL_SORT_NOUNS:
                return Definite(SORT_NOUNS[nxt], f"the {nxt}"), pos + 2
            return None, pos + 1
        ent, pos2 = self._entity(tokens, pos)
        if ent is not None:
            name, consumed = ent
            return Name(name, " ".join(consumed)), pos2
        return None, pos

    def _quantified(self, tokens, pos):
        quantifier = tokens[pos]
        pos2 = pos + 1
        cardinality = None
        if quantifier == "both":
            cardinality = 2
        elif pos2 < len(tokens) and (tokens[pos2] in NUMBER_WORDS
                                     or tokens[pos2].isdigit()):
            cardinality = (NUMBER_WORDS.get(tokens[pos2])
                           or int(tokens[pos2]))
            pos2 += 1
        if pos2 < len(tokens) and tokens[pos2] in PLURAL_SORT_NOUNS:
            sort = PLURAL_SORT_NOUNS[tokens[pos2]]
            surface = " ".join(tokens[pos:pos2 + 1])
            return Quantified(quantifier, cardinality, sort, surface), pos2 + 1
        return None, pos2

    def _entity(self, tokens, pos):
        for phrase, name in self._entity_phrases:
            if tuple(tokens[pos:pos + len(phrase)]) == phrase:
                return (name, list(phrase)), pos + len(phrase)
        return None, pos

    def _parameter(self, tokens, pos):
        for phrase, name in self._param_phrases:
            if tuple(tokens[pos:pos + len(phrase)]) == phrase:
                return name, pos + len(phrase)
        return None, pos

    # -- generation ---------------------------------------------------------

    def generate(self, sample_budget: int) -> list[str]:
        """Distinct in-grammar sentences, shortest first; all re-parse."""
        if sample_budget < 1:
            raise ValueError("budget must be at least 1")
        sentences: set[str] = set()

        def nps_of_sort(sort):
            out = []
            for name, sorts in self.config.entities().items():
                if sort in sorts:
                    display = self.config.display(name)
                    out.append(display)
                    out.append(f"the {display}")
            return out

        location_nps = nps_of_sort("location") + [
            "it", "the deck", "all decks", "both decks", "all three decks"]
        door_nps = nps_of_sort("door") + [
            "it", "the door", "the hatch", "all doors", "both doors",
            "all three doors"]
        params = ["carbon dioxide", "carbon dioxide level", "co2",
                  "temperature", "pressure"]

        actions = []
        for verb in ("go to", "move to"):
            actions += [f"{verb} {np}" for np in location_nps]
        for verb in ("open", "close"):
            actions += [f"{verb} {np}" for np in door_nps]
        for param in params:
            actions.append(f"measure {param}")
            actions.append(f"measure the {param}")
            actions += [f"measure {param} at {np}"
                        for np in nps_of_sort("location")]

        singles = list(actions)
        singles += list(YES_WORDS) + list(NO_WORDS)
        singles += ["stop", "go back", "do that", "do that again"]
        singles += location_nps + door_nps
        singles += [f"do the same for {np}" for np in nps_of_sort("location")]
        for param in params:
            singles.append(f"what is the {param}")
            singles += [f"what is the {param} at {np}"
                        for np in nps_of_sort("location")]
        sentences.update(singles)

        if len(sentences) < sample_budget:
            for first in actions:
                for second in actions:
                    sentences.add(f"{first} and {second}")
                if len(sentences) >= sample_budget * 4:
                    break

        ordered = sorted(sentences, key=lambda s: (len(s.split()), s))
        return ordered[:sample_budget]


# ---------------------------------------------------------------------------
# Trace rendering


def render_term(term) -> str:
    if isinstance(term, Name):
        return term.entity
    if isinstance(term, Definite):
        return f"(definite {term.sort})"
    if isinstance(term, Pronoun):
        return f"(pronoun {term.lexeme})"
    if isinstance(term, Quantified):
        card = term.cardinality if term.cardinality is not None else "_"
        return f"(quantified {term.quantifier} {card} {term.sort})"
    if isinstance(term, Conjoined):
        return "(list " + " ".join(render_term(p) for p in term.parts) + ")"
    return str(term)


def render_linguistic(form) -> str:
    if isinstance(form, Imperative):
        parts = []
        for a in form.actions:
            if a.action == "measure":
                where = f" {render_term(a.where)}" if a.where is not None else ""
                parts.append(f"(measure {a.parameter}{where})")
            elif a.term is not None:
                parts.append(f"({a.action} {render_term(a.term)})")
            else:
                parts.append(f"({a.action})")
        return "(imperative " + " ".join(parts) + ")"
    if isinstance(form, WhQuestion):
        where = f" {render_term(form.where)}" if form.where is not None else ""
        return f"(wh {form.parameter}{where})"
    if isinstance(form, Fragment):
        return f"(fragment {render_term(form.np)})"
    if isinstance(form, DoSame):
        return f"(do_same {render_term(form.np)})"
    if isinstance(form, DoAgain):
        return "(do_again)"
    if isinstance(form, YesWord):
        return f"(yes {form.lexeme})"
    if isinstance(form, NoWord):
        return f"(no {form.lexeme})"
    if isinstance(form, StopWord):
        return "(stop_word)"
    if isinstance(form, GoBackWord):
        return "(go_back_word)"
    return str(form)
