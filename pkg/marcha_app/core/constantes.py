"""
Constantes usadas em toda a aplicação.
Sem números mágicos: tolerâncias, tamanhos de grade e cabeçalhos de saída ficam aqui.
"""
from enum import Enum


class ModoImpulso(str, Enum):
    """Realizações da entrada impulsiva."""
    IDEAL = 'ideal'
    ALTO_GANHO = 'highgain'


class ClassificacaoGuarda(str, Enum):
    """Classificação do estado em relação aos conjuntos de guarda."""
    NENHUMA = 'none'
    S1 = 'S1'
    S2 = 'S2'


class AlvoIntegracao(str, Enum):
    """Evento que encerra um trecho de balanço."""
    TOQUE = 'touchdown'
    SECAO = 'section'


class MotivoFalhaPasso(str, Enum):
    """Causas de falha de passo."""
    REVERSAO_VELOCIDADE = 'reversao de dq2'
    FORA_DO_INTERVALO = 'q2 fora do intervalo de operacao'
    ORCAMENTO_ESGOTADO = 'orcamento de tempo do balanco esgotado'
    FALHA_INTEGRACAO = 'falha de integracao'


# Tolerâncias dos conjuntos de guarda
TOLERANCIA_POSICAO_GUARDA = 1e-10       # m, localização de eventos
TOLERANCIA_VELOCIDADE_GUARDA = 1e-6     # m/s, classificação livre de impacto
TOLERANCIA_CONTATO_PADRAO = 1e-6        # m, faixa de contato rasante

# O toque só é armado depois de q2 = -FRACAO_ARMAR_TOQUE * theta1_i (após o meio do apoio)
FRACAO_ARMAR_TOQUE = 0.5

# Número de condição acima do qual sistemas lineares são tratados como singulares
CONDICAO_MAXIMA = 1e12

# VHC
PONTOS_GRADE_REGULARIDADE = 2001
TOLERANCIA_RESIDUOS_VHC = 1e-10
MAXIMO_AVALIACOES_SOLVER = 2000

# Dinâmica zero
TOLERANCIA_QUADRATURA = 1e-12
PONTOS_GRADE_POTENCIAL = 2001

# LQR discreto
MAXIMO_ITERACOES_RICCATI = 100_000
TOLERANCIA_RICCATI = 1e-12
PISO_ARREDONDAMENTO_RICCATI = 64.0     # múltiplos de eps * ||P||_inf
LIMITE_DIVERGENCIA_RICCATI = 1e12

# Controle de alto ganho
FATOR_TEMPO_ALTO_GANHO = 100.0

# Simulação
PASSO_MAXIMO_ALTO_GANHO_FATOR = 0.1
REDUCAO_PERTURBACAO_LINEARIZACAO = 0.1

# Saída
ARQUIVO_TRAJETORIA = 'trajetoria.csv'
ARQUIVO_PASSOS = 'passos.csv'
ARQUIVO_DINAMICA_ZERO = 'dinamica_zero.csv'
ARQUIVO_ORBITA_ALVO = 'orbita_alvo.csv'
ARQUIVO_MARCHA = 'marcha.ini'
ARQUIVO_CONFIG_EFETIVA = 'config_efetiva.ini'
ARQUIVO_RESUMO = 'resumo.txt'
ARQUIVOS_MATRIZES = {
    'z_estrela': 'z_estrela.txt',
    'A': 'A.txt',
    'B': 'B.txt',
    'K': 'K.txt',
}
FORMATO_MATRIZ = '%.17g'
FORMATO_CSV = '%.12g'

# Códigos de saída dos comandos
CODIGO_SAIDA_VALIDACAO = 2
CODIGO_SAIDA_FALHA_PASSO = 3
CODIGO_SAIDA_NUMERICA = 4
