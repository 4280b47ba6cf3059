"""
Chemistry primitives
====================

Parse SMILES strings into molecular graphs, count atoms and charges,
compare molecules by fingerprint, and check reaction balance.
"""

from rxnparse.chem import (
    atom_count_vector,
    conservation_residual,
    fingerprint,
    formal_charge_sum,
    parse_smiles,
    tanimoto,
    write_smiles,
)

# Parsing gives an immutable molecular graph; hydrogens on bare atoms are
# implied by the standard valence table.
ethanol = parse_smiles("CCO")
print("ethanol atoms:", [a.element for a in ethanol.atoms])
print("ethanol formula:", atom_count_vector(ethanol).as_dict())

# Bracket atoms carry exact hydrogen counts and formal charges.
ammonium = parse_smiles("[NH4+]")
print("ammonium formula:", atom_count_vector(ammonium).as_dict())
print("ammonium charge:", formal_charge_sum(ammonium))

# Serialization is not canonical but preserves the atom inventory.
print("re-serialized:", write_smiles(ethanol))

# Fingerprints hash all short element/bond paths; Tanimoto compares them.
fp_ethanol = fingerprint(ethanol)
fp_propanol = fingerprint(parse_smiles("CCCO"))
fp_benzene = fingerprint(parse_smiles("c1ccccc1"))
print("ethanol ~ propanol:", round(tanimoto(fp_ethanol, fp_propanol), 3))
print("ethanol ~ benzene: ", round(tanimoto(fp_ethanol, fp_benzene), 3))

# Conservation residuals: zero means the reaction balances. Dehydration
# of ethanol balances; losing the water leaves an H2O-shaped residual.
balanced = conservation_residual(
    [parse_smiles("CCO")], [parse_smiles("C=C"), parse_smiles("O")]
)
print("CCO -> C=C + O residual:", balanced[0].as_dict(), "charge:", balanced[1])

unbalanced = conservation_residual([parse_smiles("CCO")], [parse_smiles("C=C")])
print("CCO -> C=C residual:   ", unbalanced[0].as_dict(), "charge:", unbalanced[1])
