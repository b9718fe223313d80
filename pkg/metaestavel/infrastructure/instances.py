"""
Configurações prontas (RunConfig em forma de dicionário) dos exemplos da galeria.
Servidas pelo GaleriaRepositoryMemoria e escritas pelo subcomando `gallery`.
"""

DUPLO_POCO = 'x1^4/4 - x1^2/2 + x1/10'

EXEMPLOS = {
    # Witten 1D: poços assimétricos em −1 e 1, sela perto de 0.1
    'witten': {
        'operador': {'galeria': 'witten', 'parametros': {'f': DUPLO_POCO, 'dimensao': 1}},
        'dominio': [[-2.5, 2.5]],
        'malha': {'paisagem': [501], 'validacao': [8001]},
        'h': [0.05, 0.07, 0.1],
        'relatorios': ['lacuna'],
        'semigrupo': {'delta': 0.2, 'g_mais': 20.0, 'tol_plateau': 1e-3, 'tol_taxa': 0.2},
    },
    'nonreversible': {
        'operador': {
            'galeria': 'nonreversible',
            'parametros': {'f': DUPLO_POCO + ' + x2^2/2', 'dimensao': 2, 'kappa': 1.0},
        },
        'dominio': [[-2.2, 2.2], [-2.0, 2.0]],
        'malha': {'paisagem': [121, 101], 'validacao': [91, 61]},
        'h': [0.1, 0.15],
    },
    # Kramers–Fokker–Planck em (x, v) com γ = 1
    'kfp': {
        'operador': {'galeria': 'kfp', 'parametros': {'V': DUPLO_POCO, 'gamma': 1.0, 'n': 1}},
        'dominio': [[-2.2, 2.2], [-3.5, 3.5]],
        'malha': {'paisagem': [121, 121], 'validacao': [81, 81]},
        'h': [0.1],
        'hipo': {'T': 1.0, 'C': 100.0, 'amostras': 64},
    },
    'susy_breaking': {
        'operador': {'galeria': 'susy_breaking', 'parametros': {'raio': 1.0, 'largura': 0.3, 'C0': 0.5}},
        'dominio': [[-1.6, 1.6], [-1.6, 1.6]],
        'malha': {'paisagem': [81, 81], 'validacao': [161, 161]},
        'h': [1.0],
    },
    # Controle negativo: A⁰ degenerada com b⁰ = 0 viola a condição de Kalman
    'kalman_falha': {
        'operador': {'f': 'x1^2/2 + x2^2/2', 'A0': [['0', '0'], ['0', '1']], 'b0': ['0', '0']},
        'dominio': [[-1.0, 1.0], [-1.0, 1.0]],
        'malha': {'paisagem': [41, 41], 'validacao': [41, 41]},
        'h': [0.1],
    },
}
