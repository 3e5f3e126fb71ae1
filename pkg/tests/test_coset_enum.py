from __future__ import annotations

import random

import pytest

from lpcoset import (
    Alphabet,
    CosetTable,
    FinitePresentation,
    InputError,
    ParseError,
    Permutation,
    PermutationRep,
    PreconditionError,
    SubgroupSpec,
    Word,
    dump_table,
    merge_coincidence,
    merge_coincidences,
    parse_table_dump,
    parse_word,
    parse_words,
    schreier_generators,
    standardize,
    to_perm_rep,
    todd_coxeter,
    trace,
    word_image,
)
from lpcoset.coset_enum import coset_representatives, table_from_rep

from helpers import congruence_quotient_size, enumeration_fixtures, random_word


def cyclic_table(n: int) -> CosetTable:
    """Regular action of the cyclic group of order n on itself."""
    abc = Alphabet(("a",))
    perm = Permutation(tuple((i % n) + 1 for i in range(1, n + 1)))
    return table_from_rep(PermutationRep(abc, n, (perm,)))


class TestToddCoxeter:
    def test_basilica_level_zero_index_three(self, bas):
        fp = bas.covering(0)
        sub = SubgroupSpec(bas.alphabet, tuple(parse_words(bas.alphabet, "a^3, b, a*b*a")))
        table = todd_coxeter(fp, sub)
        assert table is not None
        assert table.size == 3

    def test_whole_group_gives_one_coset(self, bas, grig):
        for lp in (bas, grig):
            table = todd_coxeter(lp.covering(1), SubgroupSpec.whole_group(lp.alphabet))
            assert table.size == 1

    def test_cyclic_group_against_direct_enumeration(self):
        # oracle: multiplication table of Z/3 built directly
        abc = Alphabet(("a",))
        fp = FinitePresentation(abc, (parse_word(abc, "a^3"),))
        table = todd_coxeter(fp, SubgroupSpec(abc, ()))
        assert table.size == 3
        assert standardize(table).rows == standardize(cyclic_table(3)).rows

    def test_overflow_returns_none(self, bas):
        # the free group has no finite coset table for the trivial subgroup
        fp = FinitePresentation(bas.alphabet, ())
        assert todd_coxeter(fp, SubgroupSpec(bas.alphabet, ()), max_cosets=50) is None

    def test_max_steps_limit(self):
        abc = Alphabet(("a",))
        fp = FinitePresentation(abc, (parse_word(abc, "a^100"),))
        assert todd_coxeter(fp, SubgroupSpec(abc, ()), max_steps=10) is None

    def test_empty_alphabet(self):
        abc = Alphabet(())
        table = todd_coxeter(FinitePresentation(abc, ()), SubgroupSpec(abc, ()))
        assert table.size == 1
        assert table.is_closed

    def test_closed_invariants(self, grig):
        fp = grig.covering(1)
        sub = SubgroupSpec(
            grig.alphabet,
            tuple(parse_words(grig.alphabet, "b, c, d, a*b*a, a*c*a, a*d*a")),
        )
        table = todd_coxeter(fp, sub)
        assert table.is_closed
        for c in range(1, table.size + 1):
            for r in fp.relators:
                assert trace(table, c, r) == c
        for g in sub.generators:
            assert trace(table, 1, g) == 1
        # generator actions are bijections of the cosets
        to_perm_rep(table)

    @pytest.mark.parametrize("name,fp,sub", enumeration_fixtures())
    def test_strategy_independence(self, name, fp, sub):
        felsch = todd_coxeter(fp, sub, strategy="felsch")
        hlt = todd_coxeter(fp, sub, strategy="hlt")
        assert felsch is not None and hlt is not None, name
        assert standardize(felsch).rows == standardize(hlt).rows, name

    def test_hlt_lookahead_recovers_space(self):
        # a collapsing order-8 group: plain relator sweeps peak at 15 cosets,
        # a coincidence-only lookahead pass gets through with 10
        abc = Alphabet(("x", "y"))
        fp = FinitePresentation(abc, tuple(parse_words(abc, "x^2*y^2 y^-1*x*y*x^-3")))
        sub = SubgroupSpec(abc, ())
        reference = todd_coxeter(fp, sub)
        assert reference is not None and reference.size == 8
        plain = todd_coxeter(fp, sub, strategy="hlt", max_cosets=12)
        ahead = todd_coxeter(fp, sub, strategy="hlt", max_cosets=12, hlt_lookahead=True)
        assert plain is None
        assert ahead is not None
        assert standardize(ahead).rows == standardize(reference).rows

    @pytest.mark.parametrize("level", [0, 1])
    def test_index_divisibility_across_levels(self, bas, grig, level):
        from lpcoset import burnside

        fixtures = [
            (bas, "a^3, b, a*b*a"),
            (grig, "b, c, d, a*b*a, a*c*a, a*d*a"),
            (burnside(1, 2), "a1^3"),
        ]
        for lp, text in fixtures:
            sub = SubgroupSpec(lp.alphabet, tuple(parse_words(lp.alphabet, text)))
            small = todd_coxeter(lp.covering(level), sub)
            big = todd_coxeter(lp.covering(level + 1), sub)
            assert small is not None and big is not None
            assert small.size % big.size == 0

    def test_strategy_agreement_on_random_presentations(self):
        # seeded fuzz: both strategies must close on the same table (or both
        # hit the limit) for arbitrary small presentations
        rng = random.Random(97)
        abc = Alphabet(("x", "y"))
        closed = 0
        for _ in range(40):
            relators = tuple(
                random_word(rng, abc, 6) for _ in range(rng.randrange(1, 4))
            )
            fp = FinitePresentation(abc, relators)
            sub = SubgroupSpec(
                abc, tuple(random_word(rng, abc, 4) for _ in range(rng.randrange(3)))
            )
            felsch = todd_coxeter(fp, sub, max_cosets=300, strategy="felsch")
            hlt = todd_coxeter(fp, sub, max_cosets=300, strategy="hlt")
            if felsch is None or hlt is None:
                continue
            closed += 1
            assert standardize(felsch).rows == standardize(hlt).rows
        assert closed >= 10

    def test_divisibility_is_strict_somewhere(self):
        # burnside(1,2): the level-0 cover sees <a^3> with index 3, level 1
        # forces a^2 = 1 and the index drops to 1
        from lpcoset import burnside

        lp = burnside(1, 2)
        sub = SubgroupSpec(lp.alphabet, tuple(parse_words(lp.alphabet, "a1^3")))
        assert todd_coxeter(lp.covering(0), sub).size == 3
        assert todd_coxeter(lp.covering(1), sub).size == 1


class TestTrace:
    def test_basilica_trace(self, bas_u_result):
        table = bas_u_result.table
        a = Word.generator(table.alphabet, 1)
        assert trace(table, 1, a) == 2
        assert table.entry(1, 1) == 2
        assert table.entry(2, -1) == 1
        assert trace(table, 1, Word.identity(table.alphabet)) == 1

    def test_partial_table_returns_none(self, bas):
        rows = ((0, 0, 0, 0),)
        table = CosetTable(bas.alphabet, rows)
        assert trace(table, 1, Word.generator(bas.alphabet, 1)) is None

    def test_out_of_range_start(self, bas_u_result):
        with pytest.raises(InputError):
            trace(bas_u_result.table, 9, Word.identity(bas_u_result.table.alphabet))

    def test_trace_matches_perm_rep(self, bas_u_result):
        table = bas_u_result.table
        rep = to_perm_rep(table)
        rng = random.Random(3)
        for _ in range(100):
            w = random_word(rng, table.alphabet, 12)
            img = word_image(rep, w)
            for c in range(1, table.size + 1):
                assert trace(table, c, w) == img.apply(c)


class TestMergeCoincidence:
    def test_merge_with_itself_is_identity(self, bas_u_result):
        table = bas_u_result.table
        assert merge_coincidence(table, 2, 2).rows == table.rows

    @pytest.mark.parametrize("other", [2, 3, 4, 5, 6])
    def test_regular_action_quotient_oracle(self, other):
        table = cyclic_table(6)
        merged = merge_coincidence(table, 1, other)
        expected = congruence_quotient_size(table, [(1, other)])
        assert merged.size == expected
        assert 6 % merged.size == 0

    def test_two_generator_regular_action(self):
        # regular action of S3 on itself; identifying 1 with any point
        # quotients by the subgroup that point represents
        abc = Alphabet(("s", "t"))
        s = Permutation.from_cycles(6, [(1, 2), (3, 5), (4, 6)])
        t = Permutation.from_cycles(6, [(1, 3, 4), (2, 5, 6)])
        table = table_from_rep(PermutationRep(abc, 6, (s, t)))
        for other in range(2, 7):
            merged = merge_coincidences(table, [(1, other)])
            assert merged.size == congruence_quotient_size(table, [(1, other)])
            assert 6 % merged.size == 0

    def test_basilica_merge_collapses_to_point(self, bas_u_result):
        merged = merge_coincidence(bas_u_result.table, 1, 2)
        assert merged.size == 1

    def test_merged_table_stays_closed_and_reachable(self, bas_u_result):
        merged = merge_coincidence(bas_u_result.table, 1, 2)
        assert merged.is_closed
        standardize(merged)  # raises if some coset is unreachable


class TestStandardize:
    def test_idempotent(self, bas_u_result):
        table = bas_u_result.table
        once = standardize(table)
        assert standardize(once).rows == once.rows

    def test_relabeled_copy_standardizes_identically(self, bas_u_result):
        # relabelings that keep the base coset fixed describe the same subgroup
        table = standardize(bas_u_result.table)
        relabel = {1: 1, 2: 3, 3: 2}
        rows = [None] * table.size
        for c in range(1, table.size + 1):
            rows[relabel[c] - 1] = tuple(relabel[d] for d in table.rows[c - 1])
        shuffled = CosetTable(table.alphabet, tuple(rows))
        assert standardize(shuffled).rows == table.rows

    def test_basilica_labels_are_canonical(self, bas_u_result):
        rep = to_perm_rep(standardize(bas_u_result.table))
        assert rep.perms[0] == Permutation.from_cycles(3, [(1, 2, 3)])
        assert rep.perms[1] == Permutation.from_cycles(3, [(2, 3)])

    def test_requires_closed(self, bas):
        table = CosetTable(bas.alphabet, ((0, 0, 0, 0),))
        with pytest.raises(PreconditionError):
            standardize(table)


class TestPermRepExtraction:
    def test_one_coset_table(self, grig):
        table = todd_coxeter(grig.covering(0), SubgroupSpec.whole_group(grig.alphabet))
        rep = to_perm_rep(table)
        assert all(p.is_identity for p in rep.perms)

    def test_round_trip_with_table_from_rep(self, bas_u_result):
        table = bas_u_result.table
        assert table_from_rep(to_perm_rep(table)).rows == table.rows


class TestSchreier:
    def test_transversal_reaches_each_coset(self, bas_u_result):
        table = bas_u_result.table
        reps = coset_representatives(table)
        for c, w in enumerate(reps, start=1):
            assert trace(table, 1, w) == c
        assert reps[0].is_identity

    def test_generators_fix_coset_one(self, bas_u_result):
        for g in schreier_generators(bas_u_result.table):
            assert not g.is_identity
            assert trace(bas_u_result.table, 1, g) == 1

    def test_generator_count_bound(self, bas_u_result):
        table = bas_u_result.table
        n, k = table.size, len(table.alphabet)
        gens = schreier_generators(table)
        assert len(gens) <= n * k
        assert len(gens) >= n * k - (n - 1)


class TestDumpFormat:
    def test_golden_basilica_dump(self, bas_u_result):
        expected = "2\t1\t3\t1\n3\t3\t1\t3\n1\t2\t2\t2\n"
        assert dump_table(standardize(bas_u_result.table)) == expected

    def test_round_trip(self, bas, bas_u_result):
        text = dump_table(bas_u_result.table)
        assert parse_table_dump(bas.alphabet, text).rows == bas_u_result.table.rows

    def test_rejects_wrong_width(self, bas):
        with pytest.raises(ParseError):
            parse_table_dump(bas.alphabet, "1\t2\n")

    def test_rejects_inconsistent_mirror(self, bas):
        # says 1*a = 2 but 2*a^-1 = 2
        bad = "2\t1\t1\t1\n2\t2\t2\t2\n"
        with pytest.raises(ParseError):
            parse_table_dump(bas.alphabet, bad)

    def test_comments_and_blanks_ignored(self, bas, bas_u_result):
        text = "# header\n\n" + dump_table(bas_u_result.table)
        assert parse_table_dump(bas.alphabet, text).rows == bas_u_result.table.rows


class TestTableValidation:
    def test_entry_out_of_range(self, bas):
        with pytest.raises(InputError):
            CosetTable(bas.alphabet, ((5, 1, 1, 1),))

    def test_row_width(self, bas):
        with pytest.raises(InputError):
            CosetTable(bas.alphabet, ((1, 1),))
