"""zkucb: version information"""

import os

__version__ = "0.1.0"

global sysconfig

sysconfig = {}
sysconfig['outputroot'] = os.environ.get('ZKUCB_OUTPUT', os.path.join(os.getcwd(), 'zkucb_output'))

basedirwork = sysconfig['outputroot']
sysconfig['tracepathroot'] = basedirwork+'/trace'
sysconfig['r1cspathroot'] = basedirwork+'/r1cs'
sysconfig['witnesspathroot'] = basedirwork+'/witness'
sysconfig['keypathroot'] = basedirwork+'/keys'
sysconfig['proofpathroot'] = basedirwork+'/proof'
sysconfig['benchpathroot'] = basedirwork+'/bench'
sysconfig['plotpathroot'] = basedirwork+'/plots'

# LCG F: s' = (a*s + c) mod 2**32
sysconfig['lcg_a'] = 1664525
sysconfig['lcg_c'] = 1013904223

# default width of every range check in the circuit
sysconfig['bitwidth'] = 64
# width used for LCG states and their carries
sysconfig['lcgwidth'] = 32
# largest argument floor_ln supports; bounds the number of steps T
sysconfig['ln_nmax'] = 2**16

sysconfig['window'] = 20
sysconfig['newton_iters'] = 20
